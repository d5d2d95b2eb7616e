#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <random>

#include "civ/dataset/application.hpp"
#include "civ/estimation/argmin_oracle.hpp"
#include "civ/estimation/catalogue.hpp"
#include "civ/estimation/civ.hpp"
#include "civ/estimation/design.hpp"
#include "civ/estimation/hac.hpp"
#include "civ/estimation/overlap.hpp"
#include "civ/estimation/transforms.hpp"
#include "civ/scm/model.hpp"
#include "civ/scm/simulate.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace civ;
using namespace civ::estimation;
using graph::ModelKind;

namespace {

std::vector<std::int64_t> hours(std::size_t n) {
    std::vector<std::int64_t> h(n);
    std::iota(h.begin(), h.end(), 0);
    return h;
}

TimeSeriesDataset simulated(ModelKind kind, int T, std::uint64_t seed, scm::ModelParams p) {
    scm::SimulationConfig cfg;
    cfg.T = T;
    cfg.seed = seed;
    return scm::simulate(scm::build_model(kind, p).first, cfg).data;
}

TimeSeriesDataset simulated(ModelKind kind, int T, std::uint64_t seed) {
    return simulated(kind, T, seed, scm::default_params(kind));
}

TimeSeriesDataset scaled(const TimeSeriesDataset& ds, const std::string& name, double c, double shift = 0.0) {
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        const auto v = ds.column(j);
        cols.emplace_back(v.begin(), v.end());
        if (ds.names()[j] == name) {
            for (auto& x : cols.back()) x = c * x + shift;
        }
    }
    return TimeSeriesDataset(ds.names(), std::move(cols), ds.hours());
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const std::array<ModelKind, 3> kModels{ModelKind::InertialDemand, ModelKind::HeterogeneousDemand,
                                       ModelKind::DemandShifting};

}  // namespace

TEST_SUITE("catalogue") {
    TEST_CASE("rows translate the table notation") {
        const auto s1 = catalogue("#1", 3);
        CHECK(s1.instruments == std::vector<LaggedRef>{{"W", 0}});
        CHECK(s1.regressors == std::vector<LaggedRef>{{"P", 0}});
        CHECK(s1.conditioning.empty());
        CHECK(s1.outcome == LaggedRef{"D", 0});

        const auto s4 = catalogue("4", 2);
        CHECK(s4.conditioning.size() == 6);
        for (int k = 1; k <= 2; ++k) {
            for (const char* c : {"W", "P", "D"}) {
                CHECK(std::count(s4.conditioning.begin(), s4.conditioning.end(), LaggedRef{c, k}) == 1);
            }
        }

        const auto s7 = catalogue("#7", 3);
        CHECK(s7.instruments.size() == 4);
        CHECK(s7.instruments.front() == LaggedRef{"W", 0});
        CHECK(s7.instruments.back() == LaggedRef{"W", 3});
        CHECK(s7.regressors == std::vector<LaggedRef>{{"P", 0}, {"P", 1}});
        CHECK(s7.conditioning == std::vector<LaggedRef>{{"D", 1}});

        const auto s8 = catalogue("#8", 2);
        CHECK(s8.regressors == std::vector<LaggedRef>{{"P", 0}, {"P", 1}, {"D", 1}});
        CHECK(s8.conditioning.empty());
    }

    TEST_CASE("unknown labels and bad depth") {
        CHECK_THROWS_AS((void)catalogue("#9", 2), std::invalid_argument);
        CHECK_THROWS_AS((void)catalogue("x", 2), std::invalid_argument);
        CHECK_THROWS_AS((void)catalogue("#2", 0), std::invalid_argument);
    }

    TEST_CASE("every row satisfies the order condition and disjointness") {
        for (const auto& label : catalogue_labels()) {
            for (int L = 2; L <= 5; ++L) {
                const auto s = catalogue(label, L);
                CHECK(s.instruments.size() >= s.regressors.size());
                CHECK_NOTHROW(s.validate());
            }
        }
    }
}

TEST_SUITE("design") {
    TEST_CASE("hand-built matrices for #3 on five rows") {
        const TimeSeriesDataset ds({"W", "P", "D"}, {{1, 2, 3, 4, 5}, {10, 11, 13, 16, 20}, {100, 90, 85, 70, 60}},
                                   hours(5));
        const auto d = build_design(ds, catalogue("#3", 1));
        REQUIRE(d.n() == 4);
        CHECK(d.y == Eigen::Vector4d(90, 85, 70, 60));
        CHECK(d.x.col(0) == Eigen::Vector4d(11, 13, 16, 20));
        CHECK(d.instruments.col(0) == Eigen::Vector4d(2, 3, 4, 5));
        REQUIRE(d.conditioning.cols() == 2);
        CHECK(d.conditioning.col(0) == Eigen::Vector4d::Ones());
        CHECK(d.conditioning.col(1) == Eigen::Vector4d(100, 90, 85, 70));
    }

    TEST_CASE("contemporaneous refs are column selections") {
        const TimeSeriesDataset ds({"W", "P", "D"}, {{1, 2, 3, 4}, {5, 3, 7, 1}, {9, 8, 6, 7}}, hours(4));
        const auto d = build_design(ds, catalogue("#1", 1));
        CHECK(d.n() == 4);
        CHECK(d.y == Eigen::Vector4d(9, 8, 6, 7));
        CHECK(d.x.col(0) == Eigen::Vector4d(5, 3, 7, 1));
    }

    TEST_CASE("too-deep lags and missing columns are errors") {
        const TimeSeriesDataset ds({"W", "P", "D"}, {{1, 2, 3}, {1, 3, 2}, {3, 1, 2}}, hours(3));
        CHECK_THROWS_AS((void)build_design(ds, catalogue("#2", 5)), std::invalid_argument);
        const TimeSeriesDataset no_w({"P", "D"}, {{1, 3, 2, 5}, {3, 1, 2, 4}}, hours(4));
        CHECK_THROWS_AS((void)build_design(no_w, catalogue("#1", 1)), std::invalid_argument);
    }

    TEST_CASE("gaps in the hour index are not bridged by lags") {
        const TimeSeriesDataset ds({"W", "P", "D"},
                                   {{1, 2, 3, 4, 5, 6, 7}, {3, 1, 4, 1, 5, 9, 2}, {2, 7, 1, 8, 2, 8, 1}},
                                   {0, 1, 2, 3, 10, 11, 12});
        const auto d = build_design(ds, catalogue("#3", 1));
        CHECK(d.n() == 5);  // rows at hours 1, 2, 3, 11, 12
    }

    TEST_CASE("n_used is T minus the deepest lag") {
        const auto ds = simulated(ModelKind::InertialDemand, 400, 1);
        for (const auto& label : catalogue_labels()) {
            const auto spec = catalogue(label, 4);
            CHECK(civ_estimate(ds, spec).n_used == 400 - static_cast<std::size_t>(spec.max_lag()));
        }
    }

    TEST_CASE("collinear covariates are dropped") {
        auto ds = simulated(ModelKind::InertialDemand, 300, 2);
        const auto w = ds.column("W");
        std::vector<double> twice(w.begin(), w.end()), flat(ds.rows(), 7.0);
        for (auto& v : twice) v *= 2.0;
        ds = ds.with_column("const", flat).with_column("Wx2", twice);
        DesignOptions opts;
        opts.covariates = {"const", "Wx2"};
        const auto d = build_design(ds, catalogue("#3", 1), opts);
        CHECK(std::find(d.dropped.begin(), d.dropped.end(), "const") != d.dropped.end());
        CHECK(std::find(d.dropped.begin(), d.dropped.end(), "Wx2") == d.dropped.end());
    }
}

TEST_SUITE("closed form") {
    TEST_CASE("matches the argmin oracle on every spec and model") {
        for (auto kind : kModels) {
            const auto ds = simulated(kind, 5000, 100 + static_cast<int>(kind));
            for (const auto& label : catalogue_labels()) {
                CAPTURE(label);
                CAPTURE(graph::model_name(kind));
                const auto spec = catalogue(label, 5);
                const auto design = build_design(ds, spec);
                const auto closed = civ_estimate(design);
                const auto argmin = numeric_argmin_oracle(design);
                for (Eigen::Index k = 0; k < closed.beta_hat.size(); ++k) {
                    CHECK(rel(argmin.beta(k), closed.beta_hat(k)) <= 1e-6);
                }
            }
        }
    }

    TEST_CASE("objective vanishes at the truth on noiseless data") {
        auto p = scm::default_params(ModelKind::InertialDemand);
        p.sigma_D = 0.0;
        p.sigma_S = 1.0;
        const auto ds = simulated(ModelKind::InertialDemand, 500, 3, p);
        const auto d = build_design(ds, catalogue("#8", 3));
        Eigen::VectorXd truth(3);
        truth << p.beta_P, 0.0, p.beta_D1;
        CHECK(civ_objective(d, truth) < 1e-12 * std::max(1.0, civ_objective(d, Eigen::VectorXd::Zero(3))));
        CHECK(civ_estimate(d).beta_hat(0) == doctest::Approx(p.beta_P).epsilon(1e-8));
    }

    TEST_CASE("exactly identified without conditioning is the covariance ratio") {
        const auto ds = simulated(ModelKind::HeterogeneousDemand, 3000, 4);
        const auto W = ds.column("W"), P = ds.column("P"), D = ds.column("D");
        auto cov = [](std::span<const double> a, std::span<const double> b) {
            const double ma = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
            const double mb = std::accumulate(b.begin(), b.end(), 0.0) / b.size();
            double s = 0;
            for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
            return s;
        };
        const double ratio = cov(D, W) / cov(P, W);
        CHECK(rel(civ_estimate(ds, catalogue("#1", 1)).effect(), ratio) <= 1e-10);
    }

    TEST_CASE("conditioning by residualization equals including the controls") {
        for (auto kind : kModels) {
            const auto ds = simulated(kind, 2000, 5);
            for (const auto& label : catalogue_labels()) {
                const auto d = build_design(ds, catalogue(label, 3));
                const Eigen::VectorXd fw = test::full_2sls(d.y, d.x, d.instruments, d.conditioning);
                const auto r = civ_estimate(d);
                for (Eigen::Index k = 0; k < fw.size(); ++k) CHECK(rel(r.beta_hat(k), fw(k)) <= 1e-8);
            }
        }
    }

    TEST_CASE("rescaling the instrument leaves the estimate unchanged") {
        const auto ds = simulated(ModelKind::InertialDemand, 2000, 6);
        for (double c : {-3.0, 0.001, 250.0}) {
            const auto s = scaled(ds, "W", c);
            for (const auto& label : {"#2", "#4", "#8"}) {
                CHECK(rel(civ_estimate(s, catalogue(label, 3)).effect(), civ_estimate(ds, catalogue(label, 3)).effect()) <=
                      1e-10);
            }
        }
    }

    TEST_CASE("perfect instrument reduces to least squares") {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> z;
        const std::size_t n = 1000;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = z(rng);
            y[i] = 3.0 + 2.0 * x[i] + z(rng);
        }
        const TimeSeriesDataset ds({"X", "Z", "Y"}, {x, x, y}, hours(n));
        EstimatorSpec spec;
        spec.instruments = {{"Z", 0}};
        spec.regressors = {{"X", 0}};
        spec.outcome = {"Y", 0};
        spec.label = "ols";
        const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
        }
        CHECK(rel(civ_estimate(ds, spec).effect(), sxy / sxx) <= 1e-12);
    }

    TEST_CASE("intervals, covariance and first stage are well formed") {
        const auto ds = simulated(ModelKind::InertialDemand, 3000, 8);
        for (const auto& label : catalogue_labels()) {
            const auto r = civ_estimate(ds, catalogue(label, 3));
            CHECK((r.hac_cov - r.hac_cov.transpose()).norm() <= 1e-12 * r.hac_cov.norm());
            CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r.hac_cov).eigenvalues().minCoeff() >=
                  -1e-10 * r.hac_cov.norm());
            for (Eigen::Index k = 0; k < r.beta_hat.size(); ++k) {
                CHECK((r.ci(k, 0) + r.ci(k, 1)) / 2 == doctest::Approx(r.beta_hat(k)));
                CHECK(r.ci(k, 1) - r.ci(k, 0) == doctest::Approx(2 * 1.96 * r.se(k)));
            }
            CHECK(r.first_stage.pi.rows() == static_cast<Eigen::Index>(catalogue(label, 3).instruments.size()));
            CHECK(r.first_stage.pi.cols() == r.beta_hat.size());
            CHECK(r.first_stage.instrument_sd.minCoeff() > 0);
        }
    }

    TEST_CASE("nuisance regressors do not disturb the effect of interest") {
        const auto ds = simulated(ModelKind::InertialDemand, 20'000, 9);
        const auto r = civ_estimate(ds, catalogue("#8", 5));
        CHECK(r.beta_hat.size() == 3);
        CHECK(std::abs(r.effect() + 100.0) < 4 * r.se(0));
        CHECK(r.regressor_names.size() == 3);
    }

    TEST_CASE("collinear instruments are reported as such") {
        auto ds = simulated(ModelKind::InertialDemand, 500, 10);
        const auto w = ds.column("W");
        ds = ds.with_column("W2", {w.begin(), w.end()});
        EstimatorSpec spec = catalogue("#1", 1);
        spec.instruments.push_back({"W2", 0});
        CHECK_THROWS_AS((void)civ_estimate(ds, spec), CollinearInstrumentsError);
    }
}

TEST_SUITE("hac") {
    TEST_CASE("matches the textbook double sum") {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> z;
        Eigen::MatrixXd g(400, 2);
        for (Eigen::Index i = 0; i < g.rows(); ++i) g.row(i) << z(rng), z(rng) + (i ? 0.5 * g(i - 1, 1) : 0.0);
        for (int bw : {0, 1, 5, 12}) {
            CHECK((long_run_variance(g, bw) - test::newey_west(g, bw)).norm() <= 1e-10 * test::newey_west(g, bw).norm());
        }
    }

    TEST_CASE("zero bandwidth is the White sandwich") {
        std::mt19937_64 rng(12);
        std::normal_distribution<double> z;
        const Eigen::Index n = 500;
        Eigen::MatrixXd m(n, 2);
        Eigen::VectorXd u(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            m.row(i) << z(rng), z(rng);
            u(i) = z(rng) * (1.0 + std::abs(m(i, 0)));
        }
        const Eigen::MatrixXd bread = (m.transpose() * m).inverse();
        Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(2, 2);
        for (Eigen::Index i = 0; i < n; ++i) meat += u(i) * u(i) * m.row(i).transpose() * m.row(i);
        const Eigen::MatrixXd white = bread * meat * bread;
        CHECK((hac_cov(m, u, 0) - white).norm() <= 1e-10 * white.norm());
    }

    TEST_CASE("close to classical for independent errors, larger under autocorrelation") {
        std::mt19937_64 rng(13);
        std::normal_distribution<double> z;
        const Eigen::Index n = 50'000;
        Eigen::MatrixXd m(n, 1);
        Eigen::VectorXd iid(n), ar(n);
        double prev_m = 0, prev_u = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            m(i, 0) = prev_m = 0.8 * prev_m + z(rng);
            iid(i) = z(rng);
            ar(i) = prev_u = 0.8 * prev_u + z(rng);
        }
        const int bw = default_bandwidth(n);
        const double hac_iid = std::sqrt(hac_cov(m, iid, bw)(0, 0));
        const double classical = std::sqrt(classical_cov(m, iid)(0, 0));
        CHECK(std::abs(hac_iid / classical - 1.0) < 0.10);
        CHECK(hac_cov(m, ar, bw)(0, 0) > hac_cov(m, ar, 0)(0, 0));
    }

    TEST_CASE("default bandwidth rule") {
        CHECK(default_bandwidth(100) == 4);
        CHECK(default_bandwidth(43'800) == static_cast<int>(std::floor(4 * std::pow(438.0, 2.0 / 9.0))));
        CHECK_THROWS_AS((void)long_run_variance(Eigen::MatrixXd::Ones(3, 1), -1), std::invalid_argument);
    }
}

TEST_SUITE("civ3") {
    TEST_CASE("irrelevant wind fails, relevant wind passes") {
        auto p = scm::default_params(ModelKind::InertialDemand);
        p.gamma_W = 0.0;
        const auto dead = simulated(ModelKind::InertialDemand, 20'000, 14, p);
        const auto c = civ3_check(dead, catalogue("#2", 5));
        CHECK_FALSE(c.pass);
        CHECK(c.sigma_min_std < c.tol);

        const auto live = simulated(ModelKind::InertialDemand, 20'000, 14);
        const auto ok = civ3_check(live, catalogue("#2", 5));
        CHECK(ok.pass);
        CHECK(ok.sigma_min > 0);
    }

    TEST_CASE("duplicated regressor is rank deficient") {
        auto ds = simulated(ModelKind::InertialDemand, 2000, 15);
        const auto pcol = ds.column("P");
        ds = ds.with_column("P2", {pcol.begin(), pcol.end()});
        EstimatorSpec spec = catalogue("#6", 3);
        spec.regressors = {{"P", 0}, {"P2", 0}};
        const auto c = civ3_check(ds, spec);
        CHECK_FALSE(c.pass);
        CHECK(c.sigma_min_std < 1e-8);
        CHECK_THROWS_AS((void)civ_estimate(ds, spec), Civ3FailureError);
    }
}

TEST_SUITE("overlap") {
    EstimateResult fake(const std::string& label, double lo, double hi, double nuisance_lo = 0, double nuisance_hi = 1) {
        EstimateResult r;
        r.label = label;
        r.beta_hat = Eigen::Vector2d((lo + hi) / 2, (nuisance_lo + nuisance_hi) / 2);
        r.ci.resize(2, 2);
        r.ci << lo, hi, nuisance_lo, nuisance_hi;
        return r;
    }

    TEST_CASE("duplicates overlap; disjoint valid pair rejects") {
        const std::vector<ModelValidity> v{{"M", {"a", "b"}}, {"N", {"a", "c"}}};
        const auto same = overlap_analysis({fake("a", 0, 1), fake("b", 0, 1), fake("c", 0, 1)}, v);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(same.pairwise_overlap[i][j]);
            }
        }
        CHECK_FALSE(same.rejection("M").rejected);

        const auto split = overlap_analysis({fake("a", 0, 1), fake("b", 2, 3), fake("c", 0.5, 4)}, v);
        CHECK(split.rejection("M").rejected);
        CHECK_FALSE(split.rejection("N").rejected);
        CHECK(split.pairwise_overlap[0][1] == split.pairwise_overlap[1][0]);
    }

    TEST_CASE("only the effect of interest is compared") {
        const std::vector<ModelValidity> v{{"M", {"a", "b"}}};
        const auto r = overlap_analysis({fake("a", 0, 1, 0, 1), fake("b", 0.5, 2, 10, 11)}, v);
        CHECK_FALSE(r.rejection("M").rejected);
    }

    TEST_CASE("needs two results; touching intervals overlap") {
        CHECK_THROWS_AS((void)overlap_analysis({fake("a", 0, 1)}, {}), std::invalid_argument);
        CHECK(intervals_overlap(0, 1, 1, 2));
        CHECK_FALSE(intervals_overlap(0, 1, 1.0001, 2));
    }

    TEST_CASE("model I data rejects model II") {
        const auto ds = simulated(ModelKind::InertialDemand, 43'800, 16);
        std::vector<EstimateResult> results;
        for (const auto& label : catalogue_labels()) results.push_back(civ_estimate(ds, catalogue(label, 5)));
        const auto report = overlap_analysis(results, dataset::catalogue_validity(catalogue_labels(), 5));
        CHECK(report.rejection("model2").rejected);
        CHECK_FALSE(report.rejection("model1").rejected);
    }
}

TEST_SUITE("loglog") {
    TEST_CASE("positive prices keep every row") {
        const TimeSeriesDataset ds({"P", "D"}, {{1, 2, 3}, {10, 20, 30}}, hours(3));
        const auto t = loglog_transform(ds);
        CHECK(t.rows() == 3);
        CHECK(t.column("P")[1] == doctest::Approx(std::log(2.0)));
        CHECK(t.column("D")[2] == doctest::Approx(std::log(30.0)));
    }

    TEST_CASE("non-positive prices are removed") {
        const TimeSeriesDataset ds({"P", "D"}, {{5, -90, 0, 7}, {10, 20, 30, 40}}, hours(4));
        const auto t = loglog_transform(ds);
        CHECK(t.rows() == 2);
        CHECK(t.hours() == std::vector<std::int64_t>{0, 3});
        const TimeSeriesDataset bad({"P", "D"}, {{-1, 0}, {1, 1}}, hours(2));
        CHECK_THROWS_AS((void)loglog_transform(bad), std::invalid_argument);
    }

    TEST_CASE("scaling demand shifts only the intercept") {
        auto p = scm::default_params(ModelKind::InertialDemand);
        p.S_0 = 45'000;  // keep prices positive so nothing is dropped
        p = scm::with_intercept(ModelKind::InertialDemand, p, 60'000.0);
        const auto ds = simulated(ModelKind::InertialDemand, 3000, 17, p);
        const auto a = civ_estimate(loglog_transform(ds), catalogue("#2", 3)).effect();
        const auto b = civ_estimate(loglog_transform(scaled(ds, "D", 1.7)), catalogue("#2", 3)).effect();
        CHECK(rel(a, b) <= 1e-9);
    }
}

TEST_SUITE("coverage") {
    TEST_CASE("valid estimators cover the truth across 50 seeds") {
        // Every valid (model, estimator) pair. Seeds follow the project-wide base of 1000.
        const std::map<ModelKind, std::vector<std::string>> valid{
            {ModelKind::InertialDemand, {"#2", "#3", "#4", "#5", "#7", "#8"}},
            {ModelKind::HeterogeneousDemand, {"#1", "#2", "#4", "#5", "#6", "#8"}},
            {ModelKind::DemandShifting, {"#2", "#4", "#6", "#7", "#8"}},
        };
        for (const auto& [kind, labels] : valid) {
            std::map<std::string, int> covered;
            for (std::uint64_t seed = 1000; seed < 1050; ++seed) {
                const auto ds = simulated(kind, 43'800, seed);
                for (const auto& l : labels) covered[l] += civ_estimate(ds, catalogue(l, 5)).covers(-100.0);
            }
            for (const auto& l : labels) {
                CAPTURE(graph::model_name(kind));
                CAPTURE(l);
                CHECK(covered[l] >= 44);  // 0.88 * 50
            }
        }
    }
}
