#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <random>

#include "civ/graph/builtin.hpp"
#include "civ/scm/autoregression.hpp"
#include "civ/scm/model.hpp"
#include "civ/scm/params_json.hpp"
#include "civ/scm/simulate.hpp"
#include "doctest.h"

using namespace civ;
using namespace civ::scm;

namespace {

std::vector<double> col(const TimeSeriesDataset& ds, const std::string& name) {
    const auto c = ds.column(name);
    return {c.begin(), c.end()};
}

double mean(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

// Sample autocorrelation by the textbook formula, for comparison.
double acf(const std::vector<double>& x, int lag) {
    const double m = mean(x);
    double num = 0, den = 0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        den += (x[t] - m) * (x[t] - m);
        if (t >= static_cast<std::size_t>(lag)) num += (x[t] - m) * (x[t - lag] - m);
    }
    return num / den;
}

// Correlation of a and b after projecting both on [1, controls].
double partial_corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::MatrixXd& controls) {
    Eigen::MatrixXd c(a.size(), controls.cols() + 1);
    c << Eigen::VectorXd::Ones(a.size()), controls;
    const auto qr = c.colPivHouseholderQr();
    const Eigen::VectorXd ra = a - c * qr.solve(a);
    const Eigen::VectorXd rb = b - c * qr.solve(b);
    return ra.dot(rb) / (ra.norm() * rb.norm());
}

Simulation run(ModelKind kind, int T, std::uint64_t seed, ModelParams p, bool latent = false) {
    SimulationConfig cfg;
    cfg.T = T;
    cfg.seed = seed;
    cfg.keep_latent = latent;
    return simulate(build_model(kind, p).first, cfg);
}

}  // namespace

TEST_SUITE("model parameters") {
    TEST_CASE("defaults per model") {
        const auto m1 = default_params(ModelKind::InertialDemand);
        CHECK(m1.beta_P == -100.0);
        CHECK(m1.gamma_P == 500.0);
        CHECK(m1.gamma_W == 1.0);
        CHECK(m1.S_0 == 25'000.0);
        CHECK(m1.sigma_S == 1.0);
        CHECK(m1.sigma_D == 2'000.0);
        CHECK(m1.beta_D1 == 0.7);
        CHECK(default_params(ModelKind::HeterogeneousDemand).beta_B1 == 0.9);
        CHECK(default_params(ModelKind::DemandShifting).beta_P1 == 50.0);
    }

    TEST_CASE("stationary demand mean is 60 GWh/h for every model") {
        for (auto kind : graph::builtin_kinds()) {
            const auto p = default_params(kind);
            CHECK(stationary_means(kind, p).demand == doctest::Approx(60'000.0).epsilon(1e-12));
        }
    }

    TEST_CASE("intercept matches the expectation fixed point") {
        // Model I with no memory: E[P] from clearing, then D_0 = E[D] - beta_P E[P].
        auto p = default_params(ModelKind::InertialDemand);
        p.beta_D1 = 0.0;
        const double ep = (60'000.0 - 25'000.0 - 14'100.0) / 500.0;
        const double d0 = 60'000.0 + 100.0 * ep;
        CHECK(solve_intercept(ModelKind::InertialDemand, p, 60'000.0) == doctest::Approx(d0));
        p.D_0 = d0;
        const auto sim = run(ModelKind::InertialDemand, 100'000, 3, p);
        CHECK(mean(col(sim.data, "D")) == doctest::Approx(60'000.0).epsilon(0.005));
    }

    TEST_CASE("re-solving for the current mean returns the same intercept") {
        for (auto kind : {ModelKind::InertialDemand, ModelKind::DemandShifting}) {
            const auto p = default_params(kind);
            const double current = stationary_means(kind, p).demand;
            CHECK(solve_intercept(kind, p, current) == doctest::Approx(p.D_0).epsilon(1e-12));
        }
    }

    TEST_CASE("model II splits the intercept over A and B") {
        const auto p = default_params(ModelKind::HeterogeneousDemand);
        CHECK(p.A_0 + p.B_0 == doctest::Approx(p.D_0));
        CHECK(p.B_0 / (1.0 - p.beta_B1) == doctest::Approx(p.b_share * 60'000.0));
        const auto sim = run(ModelKind::HeterogeneousDemand, 60'000, 4, p, true);
        CHECK(mean(col(sim.data, "B")) == doctest::Approx(p.b_share * 60'000.0).epsilon(0.01));
        CHECK(mean(col(sim.data, "D")) == doctest::Approx(60'000.0).epsilon(0.005));
    }

    TEST_CASE("invalid parameters are rejected") {
        auto p = default_params(ModelKind::InertialDemand);
        p.gamma_P = p.beta_P;
        CHECK_THROWS_AS((void)build_model(ModelKind::InertialDemand, p), std::invalid_argument);
        p = default_params(ModelKind::InertialDemand);
        p.beta_D1 = 1.0;
        CHECK_THROWS_AS((void)build_model(ModelKind::InertialDemand, p), std::invalid_argument);
        p = default_params(ModelKind::InertialDemand);
        p.wind_ar = {0.6, 0.5};  // unit root outside
        CHECK_THROWS_AS((void)build_model(ModelKind::InertialDemand, p), std::invalid_argument);
        p = default_params(ModelKind::HeterogeneousDemand);
        p.beta_B1 = -1.2;
        CHECK_THROWS_AS((void)build_model(ModelKind::HeterogeneousDemand, p), std::invalid_argument);
    }

    TEST_CASE("set and json agree and reject unknown keys") {
        ModelParams p;
        p.set("beta_D1", "0.4");
        p.set("wind_ar", "0.5,0.2");
        CHECK(p.beta_D1 == 0.4);
        CHECK(p.wind_ar == std::vector<double>{0.5, 0.2});
        CHECK_THROWS_AS(p.set("beta_X", "1"), std::invalid_argument);
        CHECK_THROWS_AS(p.set("beta_P", "abc"), std::invalid_argument);

        nlohmann::json j;
        to_json(j, p);
        ModelParams q;
        from_json(j, q);
        nlohmann::json k;
        to_json(k, q);
        CHECK(j == k);
        CHECK_THROWS((void)merge_params(q, nlohmann::json{{"nope", 1}}));
    }
}

TEST_SUITE("build_model") {
    TEST_CASE("graphs match the builtin catalogue") {
        for (auto kind : {ModelKind::InertialDemand, ModelKind::HeterogeneousDemand, ModelKind::DemandShifting}) {
            const auto [spec, g] = build_model(kind, default_params(kind));
            auto a = g.edges(), b = graph::builtin_graph(kind).edges();
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            CHECK(a == b);
            CHECK(g.components() == graph::builtin_graph(kind).components());
        }
    }

    TEST_CASE("model I without memory coincides with model III without lagged price") {
        auto p1 = default_params(ModelKind::InertialDemand);
        p1.beta_D1 = 0.0;
        p1 = with_intercept(ModelKind::InertialDemand, p1, 60'000.0);
        auto p3 = default_params(ModelKind::DemandShifting);
        p3.beta_P1 = 0.0;
        p3 = with_intercept(ModelKind::DemandShifting, p3, 60'000.0);
        const auto g1 = build_model(ModelKind::InertialDemand, p1).second;
        const auto g3 = build_model(ModelKind::DemandShifting, p3).second;
        auto e1 = g1.edges(), e3 = g3.edges(), es = graph::builtin_graph(ModelKind::NoDemandMemory).edges();
        std::sort(e1.begin(), e1.end());
        std::sort(e3.begin(), e3.end());
        std::sort(es.begin(), es.end());
        CHECK(e1 == e3);
        CHECK(e1 == es);
        const auto s1 = run(ModelKind::InertialDemand, 500, 8, p1);
        const auto s3 = run(ModelKind::DemandShifting, 500, 8, p3);
        for (const auto* name : {"W", "P", "D"}) {
            const auto a = col(s1.data, name), b = col(s3.data, name);
            for (std::size_t t = 0; t < a.size(); ++t) CHECK(a[t] == doctest::Approx(b[t]).epsilon(1e-12));
        }
    }
}

TEST_SUITE("simulate") {
    TEST_CASE("same seed, same data; different seed, different data") {
        const auto p = default_params(ModelKind::InertialDemand);
        const auto a = run(ModelKind::InertialDemand, 1000, 42, p);
        const auto b = run(ModelKind::InertialDemand, 1000, 42, p);
        const auto c = run(ModelKind::InertialDemand, 1000, 43, p);
        CHECK(col(a.data, "D") == col(b.data, "D"));
        CHECK(col(a.data, "D") != col(c.data, "D"));
        CHECK(a.data.rows() == 1000);
        CHECK(a.data.names() == std::vector<std::string>{"W", "P", "D"});
    }

    TEST_CASE("noiseless runs sit at the fixed point") {
        for (auto kind : {ModelKind::InertialDemand, ModelKind::HeterogeneousDemand, ModelKind::DemandShifting}) {
            auto p = default_params(kind);
            p.sigma_S = p.sigma_D = p.sigma_A = p.sigma_B = p.sigma_W = 0.0;
            const auto m = stationary_means(kind, p);
            const auto sim = run(kind, 50, 1, p);
            for (double d : col(sim.data, "D")) CHECK(d == doctest::Approx(m.demand).epsilon(1e-12));
            for (double x : col(sim.data, "P")) CHECK(x == doctest::Approx(m.price).epsilon(1e-10));
            for (double w : col(sim.data, "W")) CHECK(w == doctest::Approx(m.wind).epsilon(1e-12));
        }
    }

    TEST_CASE("market clears and demand residuals are the drawn shocks") {
        for (auto kind : {ModelKind::InertialDemand, ModelKind::HeterogeneousDemand, ModelKind::DemandShifting}) {
            CAPTURE(graph::model_name(kind));
            const auto p = default_params(kind);
            const auto sim = run(kind, 5000, 21, p, true);
            const auto W = col(sim.data, "W"), P = col(sim.data, "P"), D = col(sim.data, "D");
            const auto US = col(sim.shocks, "U_S"), UD = col(sim.shocks, "U_D");
            double worst_clear = 0, worst_resid = 0;
            for (std::size_t t = 1; t < D.size(); ++t) {
                const double S = p.S_0 + p.gamma_W * W[t] + p.gamma_P * P[t] + US[t];
                worst_clear = std::max(worst_clear, std::abs(S - D[t]) / std::abs(D[t]));
                double resid = 0;
                if (kind == ModelKind::InertialDemand) {
                    resid = D[t] - (p.D_0 + p.beta_D1 * D[t - 1] + p.beta_P * P[t]);
                } else if (kind == ModelKind::DemandShifting) {
                    resid = D[t] - (p.D_0 + p.beta_P * P[t] + p.beta_P1 * P[t - 1]);
                } else {
                    const auto B = col(sim.data, "B");
                    const auto A = col(sim.data, "A");
                    CHECK(A[t] + B[t] == doctest::Approx(D[t]).epsilon(1e-14));
                    resid = (A[t] - p.A_0 - p.beta_P * P[t]) + (B[t] - p.B_0 - p.beta_B1 * B[t - 1]);
                }
                worst_resid = std::max(worst_resid, std::abs(resid - UD[t]));
            }
            CHECK(worst_clear < 1e-9);
            CHECK(worst_resid < 1e-9);
        }
    }

    TEST_CASE("wind follows its autoregression") {
        auto p = default_params(ModelKind::InertialDemand);
        p.wind_ar = {0.5, 0.3};
        const auto sim = run(ModelKind::InertialDemand, 200, 2, p);
        const auto W = col(sim.data, "W"), UW = col(sim.shocks, "U_W");
        for (std::size_t t = 2; t < W.size(); ++t) {
            const double pred = p.wind_mean * (1 - 0.8) + 0.5 * W[t - 1] + 0.3 * W[t - 2] + UW[t];
            CHECK(W[t] == doctest::Approx(pred).epsilon(1e-12));
        }
    }

    TEST_CASE("series is stationary after burn-in") {
        const auto sim = run(ModelKind::InertialDemand, 43'800, 5, default_params(ModelKind::InertialDemand));
        const auto D = col(sim.data, "D");
        const std::vector<double> first(D.begin(), D.begin() + D.size() / 2), second(D.begin() + D.size() / 2, D.end());
        CHECK(std::abs(mean(first) - mean(second)) / mean(D) < 0.01);
        for (double d : D) REQUIRE(std::isfinite(d));
    }

    TEST_CASE("observed demand memory grows with structural memory") {
        std::vector<double> alpha;
        for (double b : {0.1, 0.5, 0.9}) {
            auto p = default_params(ModelKind::InertialDemand);
            p.beta_D1 = b;
            p = with_intercept(ModelKind::InertialDemand, p, 60'000.0);
            double acc = 0;
            for (std::uint64_t s = 0; s < 3; ++s) acc += acf(col(run(ModelKind::InertialDemand, 43'800, s, p).data, "D"), 1);
            alpha.push_back(acc / 3);
        }
        CHECK(alpha[0] > 0);
        CHECK(alpha[0] < alpha[1]);
        CHECK(alpha[1] < alpha[2]);
    }

    TEST_CASE("instrument relevance and an implied independence") {
        const auto sim = run(ModelKind::InertialDemand, 100'000, 9, default_params(ModelKind::InertialDemand));
        const auto W = col(sim.data, "W"), D = col(sim.data, "D");
        const int L = 5;
        const Eigen::Index n = static_cast<Eigen::Index>(W.size()) - L;
        Eigen::VectorXd w0(n), d0(n), dlag(n);
        Eigen::MatrixXd wl(n, L);
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::size_t t = static_cast<std::size_t>(i + L);
            w0(i) = W[t];
            d0(i) = D[t];
            dlag(i) = D[t - 1];
            for (int s = 1; s <= L; ++s) wl(i, s - 1) = W[t - s];
        }
        // #2's conditioning set leaves W_t clearly related to D_t ...
        CHECK(std::abs(partial_corr(w0, d0, wl)) > 0.1);
        // ... while W_t is independent of D_{t-1} given W_{t-1}.
        CHECK(std::abs(partial_corr(w0, dlag, wl.leftCols(1))) < 4.0 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_SUITE("autoregression") {
    TEST_CASE("white noise has no lag-1 correlation") {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> z;
        std::vector<double> x(20'000);
        for (auto& v : x) v = z(rng);
        CHECK(std::abs(observed_autocorrelation(x, 1)) < 3.0 / std::sqrt(20'000.0));
        CHECK(observed_autocorrelation(x, 3) == doctest::Approx(acf(x, 3)).epsilon(1e-12));
    }

    TEST_CASE("AR(1) recovers its coefficient") {
        std::mt19937_64 rng(2);
        std::normal_distribution<double> z;
        std::vector<double> x(50'000);
        double prev = 0;
        for (auto& v : x) prev = v = 0.9 * prev + z(rng);
        CHECK(observed_autocorrelation(x, 1) == doctest::Approx(0.9).epsilon(0.02 / 0.9));
    }

    TEST_CASE("alternating series and degenerate inputs") {
        std::vector<double> alt(100);
        for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? 1.0 : -1.0;
        CHECK(observed_autocorrelation(alt, 1) == doctest::Approx(-1.0).epsilon(0.02));
        const std::vector<double> flat(50, 3.0);
        CHECK_THROWS_AS((void)observed_autocorrelation(flat, 1), std::invalid_argument);
        CHECK_THROWS_AS((void)observed_autocorrelation(std::vector<double>{1, 2}, 2), std::invalid_argument);
    }

    TEST_CASE("fit_ar recovers an AR(3)") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> z;
        const std::vector<double> phi{0.5, -0.2, 0.3};
        REQUIRE(ar_spectral_radius(phi) < 1.0);
        std::vector<double> x(100'000, 0.0);
        for (std::size_t t = 3; t < x.size(); ++t) x[t] = 2.0 + phi[0] * x[t - 1] + phi[1] * x[t - 2] + phi[2] * x[t - 3] + z(rng);
        const auto fit = fit_ar(x, 3);
        REQUIRE(fit.coefficients.size() == 3);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(fit.coefficients[k] - phi[k]) < 0.02);
        CHECK(fit.residual_sd == doctest::Approx(1.0).epsilon(0.02));
    }

    TEST_CASE("fit_ar edge cases") {
        const std::vector<double> x{1, 2, 4, 3, 5};
        CHECK(fit_ar(x, 0).coefficients.empty());
        CHECK(fit_ar(x, 0).intercept == doctest::Approx(3.0));
        CHECK_THROWS_AS((void)fit_ar(x, 5), std::invalid_argument);
        CHECK_THROWS_AS((void)fit_ar(std::vector<double>(30, 1.0), 2), std::invalid_argument);
    }

    TEST_CASE("spectral radius of the companion matrix") {
        CHECK(ar_spectral_radius(std::vector<double>{0.9}) == doctest::Approx(0.9));
        CHECK(ar_spectral_radius(std::vector<double>{}) == 0.0);
        // x_t = 0.5 x_{t-1} + 0.5 x_{t-2} has a unit root.
        CHECK(ar_spectral_radius(std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0));
    }
}
