#include "civ/experiments/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "civ/estimation/catalogue.hpp"
#include "civ/estimation/civ.hpp"
#include "civ/estimation/overlap.hpp"
#include "civ/experiments/figures.hpp"
#include "civ/experiments/parallel.hpp"
#include "civ/graph/civ_check.hpp"
#include "civ/scm/autoregression.hpp"
#include "civ/scm/params_json.hpp"
#include "civ/scm/simulate.hpp"

namespace civ::experiments {

using nlohmann::json;

namespace {

constexpr double kTargetDemand = 60'000.0;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return v;
}

// Name of the coefficient carrying the model's own memory.
std::string memory_key(ModelKind kind) {
    switch (scm::base_structure(kind)) {
        case ModelKind::HeterogeneousDemand: return "beta_B1";
        case ModelKind::DemandShifting: return "beta_P1";
        default: return "beta_D1";
    }
}

std::vector<std::string> model_names(const std::vector<ModelKind>& kinds) {
    std::vector<std::string> out;
    for (auto k : kinds) out.push_back(graph::model_name(k));
    return out;
}

json spec_json(const EstimatorSpec& s) {
    auto refs = [](const std::vector<LaggedRef>& v) {
        json a = json::array();
        for (const auto& r : v) a.push_back(to_string(r));
        return a;
    };
    return {{"label", s.label},
            {"instruments", refs(s.instruments)},
            {"regressors", refs(s.regressors)},
            {"conditioning", refs(s.conditioning)},
            {"outcome", to_string(s.outcome)},
            {"L", s.lag_depth}};
}

json provenance(const ExperimentConfig& cfg) {
    json j;
    j["config"] = cfg;
    j["rng"] = "mt19937_64, replicate r seeded with seed_base + r; Gaussian via std::normal_distribution";
    json specs = json::array();
    for (const auto& label : cfg.estimators) {
        specs.push_back(spec_json(estimation::catalogue(label, cfg.lag_depth)));
    }
    j["estimators"] = specs;
    return j;
}

double pct_error(double estimate, double truth) { return 100.0 * (estimate - truth) / std::abs(truth); }

struct Estimate {
    double beta = kNaN, se = kNaN, lo = kNaN, hi = kNaN;
    bool civ3_pass = false;
    std::string error;
    estimation::EstimateResult full;
};

Estimate try_estimate(const TimeSeriesDataset& ds, const EstimatorSpec& spec) {
    Estimate e;
    try {
        e.full = estimation::civ_estimate(ds, spec);
        e.beta = e.full.effect();
        e.se = e.full.se(0);
        e.lo = e.full.lower();
        e.hi = e.full.upper();
        e.civ3_pass = e.full.civ3_pass;
    } catch (const std::exception& ex) {
        e.error = ex.what();
    }
    return e;
}

TimeSeriesDataset simulate_once(ModelKind kind, const scm::ModelParams& p, int T, std::uint64_t seed) {
    auto [spec, graph] = scm::build_model(kind, p);
    return scm::simulate(spec, {T, burn_in_for(kind, p), seed, false}).data;
}

}  // namespace

std::string experiment_name(ExperimentId id) {
    switch (id) {
        case ExperimentId::ValidityPanel: return "validity_panel";
        case ExperimentId::BiasHeatmap: return "bias_heatmap";
        case ExperimentId::ObservedAr: return "observed_ar";
        case ExperimentId::Indicators: return "indicators";
    }
    return "unknown";
}

ExperimentId parse_experiment(const std::string& name) {
    for (auto id : {ExperimentId::ValidityPanel, ExperimentId::BiasHeatmap, ExperimentId::ObservedAr,
                    ExperimentId::Indicators}) {
        if (experiment_name(id) == name) return id;
    }
    throw std::invalid_argument("unknown experiment '" + name +
                                "' (expected validity_panel, bias_heatmap, observed_ar, indicators)");
}

void ExperimentConfig::validate() const {
    if (models.empty()) throw std::invalid_argument("experiment: no model given");
    if (replicates < 1) throw std::invalid_argument("experiment: replicates must be at least 1");
    if (T < 1) throw std::invalid_argument("experiment: T must be at least 1");
    if (lag_depth < 1) throw std::invalid_argument("experiment: L must be at least 1");
    if (estimators.empty()) throw std::invalid_argument("experiment: no estimator given");
    if (id == ExperimentId::BiasHeatmap && (wind_grid.empty() || memory_grid.empty())) {
        throw std::invalid_argument("experiment: heatmap grids must be non-empty");
    }
    if (id == ExperimentId::Indicators && sizes_years.empty()) {
        throw std::invalid_argument("experiment: no sample sizes given");
    }
    if (draws < 0) throw std::invalid_argument("experiment: draws must be non-negative");
}

ExperimentConfig preset(ExperimentId id, const std::string& name) {
    if (name != "desk" && name != "paper") {
        throw std::invalid_argument("unknown preset '" + name + "' (expected desk or paper)");
    }
    const bool paper = name == "paper";
    ExperimentConfig c;
    c.id = id;
    c.preset = name;
    c.lag_depth = 5;
    c.seed_base = 1000;
    switch (id) {
        case ExperimentId::ValidityPanel:
            c.models = {ModelKind::InertialDemand, ModelKind::HeterogeneousDemand,
                        ModelKind::DemandShifting};
            c.estimators = estimation::catalogue_labels();
            c.T = paper ? 43'800 : 20'000;
            c.replicates = paper ? 1 : 20;
            break;
        case ExperimentId::BiasHeatmap:
            c.models = {ModelKind::InertialDemand};
            c.estimators = {"#1"};
            c.wind_grid = linspace(0.0, 0.9, paper ? 10 : 5);
            c.memory_grid = c.wind_grid;
            c.T = paper ? 43'800 : 10'000;
            c.replicates = paper ? 20 : 5;
            break;
        case ExperimentId::ObservedAr:
            c.models = {ModelKind::InertialDemand, ModelKind::HeterogeneousDemand,
                        ModelKind::DemandShifting};
            c.estimators = {"#1"};
            c.coefficient_ranges = {{"beta_D1", {-0.25, 0.99}},
                                    {"beta_B1", {-0.25, 0.99}},
                                    {"beta_P1", {-250.0, 250.0}}};
            c.draws = paper ? 200 : 50;
            c.T = paper ? 43'800 : 20'000;
            break;
        case ExperimentId::Indicators:
            c.models = {ModelKind::InertialDemand};
            c.estimators = {"#2", "#4", "#8"};
            c.params = {{"beta_D1", "0.9"}};
            c.sizes_years = paper ? std::vector<double>{0.5, 1, 2, 3, 4, 5}
                                  : std::vector<double>{0.5, 1, 2};
            c.replicates = paper ? 50 : 25;
            c.T = 0;  // per size
            break;
    }
    if (id == ExperimentId::Indicators) c.T = static_cast<int>(c.sizes_years.back() * kHoursPerYear);
    return c;
}

void to_json(json& j, const ExperimentConfig& c) {
    json ranges = json::object();
    for (const auto& [k, r] : c.coefficient_ranges) ranges[k] = {r.first, r.second};
    j = json{{"experiment", experiment_name(c.id)},
             {"preset", c.preset},
             {"models", model_names(c.models)},
             {"wind_grid", c.wind_grid},
             {"memory_grid", c.memory_grid},
             {"draws", c.draws},
             {"coefficient_ranges", ranges},
             {"sizes_years", c.sizes_years},
             {"replicates", c.replicates},
             {"T", c.T},
             {"L", c.lag_depth},
             {"estimators", c.estimators},
             {"seed_base", c.seed_base},
             {"params", c.params},
             {"threads", c.threads}};
}

void merge_json(ExperimentConfig& c, const json& j) {
    if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "experiment") c.id = parse_experiment(v.get<std::string>());
        else if (key == "preset") c.preset = v.get<std::string>();
        else if (key == "models") {
            c.models.clear();
            for (const auto& m : v) c.models.push_back(graph::parse_model_kind(m.get<std::string>()));
        } else if (key == "wind_grid") c.wind_grid = v.get<std::vector<double>>();
        else if (key == "memory_grid") c.memory_grid = v.get<std::vector<double>>();
        else if (key == "draws") c.draws = v.get<int>();
        else if (key == "coefficient_ranges") {
            for (const auto& [name, r] : v.items()) {
                c.coefficient_ranges[name] = {r.at(0).get<double>(), r.at(1).get<double>()};
            }
        } else if (key == "sizes_years") c.sizes_years = v.get<std::vector<double>>();
        else if (key == "replicates") c.replicates = v.get<int>();
        else if (key == "T") c.T = v.get<int>();
        else if (key == "L") c.lag_depth = v.get<int>();
        else if (key == "estimators") c.estimators = v.get<std::vector<std::string>>();
        else if (key == "seed_base") c.seed_base = v.get<std::uint64_t>();
        else if (key == "params") {
            for (const auto& [name, value] : v.items()) {
                c.params[name] = value.is_string() ? value.get<std::string>() : value.dump();
            }
        } else if (key == "threads") c.threads = v.get<unsigned>();
        else throw std::invalid_argument("unknown experiment config key '" + key + "'");
    }
}

scm::ModelParams experiment_params(ModelKind kind, const std::map<std::string, std::string>& overrides) {
    scm::ModelParams p = scm::default_params(kind);
    bool intercept_given = false;
    for (const auto& [k, v] : overrides) {
        p.set(k, v);
        intercept_given = intercept_given || k == "D_0" || k == "A_0" || k == "B_0";
    }
    return intercept_given ? p : scm::with_intercept(kind, p, kTargetDemand);
}

scm::ModelParams with_wind_memory(scm::ModelParams p, double beta_w) {
    const scm::ModelParams defaults;
    const double stationary_sd = defaults.sigma_W / std::sqrt(1.0 - defaults.wind_ar[0] * defaults.wind_ar[0]);
    p.wind_ar = {beta_w};
    p.sigma_W = stationary_sd * std::sqrt(1.0 - beta_w * beta_w);
    return p;
}

int burn_in_for(ModelKind kind, const scm::ModelParams& p) {
    const double rho = scm::persistence(kind, p);
    return std::max(2'000, static_cast<int>(std::ceil(20.0 / (1.0 - rho))));
}

ExperimentOutput run_validity_panel(const ExperimentConfig& cfg) {
    cfg.validate();
    struct ModelSetup {
        ModelKind kind;
        scm::ModelParams params;
        std::vector<EstimatorSpec> specs;
        std::vector<graph::CivVerdict> verdicts;
    };
    std::vector<ModelSetup> setups;
    for (auto kind : cfg.models) {
        ModelSetup s{kind, experiment_params(kind, cfg.params), {}, {}};
        const auto graph = scm::build_model(kind, s.params).second;
        for (const auto& label : cfg.estimators) {
            s.specs.push_back(estimation::catalogue(label, cfg.lag_depth));
            s.verdicts.push_back(graph::check_civ_graphical(graph, s.specs.back()));
        }
        setups.push_back(std::move(s));
    }
    // Ex-ante validity lists of Models I-III for the rejection analysis.
    std::vector<estimation::ModelValidity> validity;
    for (auto kind : {ModelKind::InertialDemand, ModelKind::HeterogeneousDemand, ModelKind::DemandShifting}) {
        const auto g = graph::builtin_graph(kind);
        estimation::ModelValidity mv{graph::model_name(kind), {}};
        for (const auto& label : cfg.estimators) {
            const auto spec = estimation::catalogue(label, cfg.lag_depth);
            if (graph::check_civ_graphical(g, spec).valid()) mv.valid_labels.push_back(spec.label);
        }
        validity.push_back(std::move(mv));
    }

    const std::size_t reps = static_cast<std::size_t>(cfg.replicates);
    const auto results = parallel_map(setups.size() * reps, cfg.threads, [&](std::size_t item) {
        const auto& s = setups[item / reps];
        const auto seed = cfg.seed_base + item % reps;
        const auto ds = simulate_once(s.kind, s.params, cfg.T, seed);
        std::vector<Estimate> out;
        for (const auto& spec : s.specs) out.push_back(try_estimate(ds, spec));
        return out;
    });

    ExperimentOutput out;
    out.name = experiment_name(cfg.id);
    out.table.header = {"model",   "replicate", "seed",     "estimator", "civ1",         "civ2",
                        "valid",   "beta_hat",  "se",       "ci_lower",  "ci_upper",     "covers_truth",
                        "civ3_pass", "error"};
    out.summary.header = {"model", "estimator", "valid", "coverage", "exclusion_rate", "mean_beta_hat",
                          "estimated"};
    json rejections = json::object();
    for (std::size_t m = 0; m < setups.size(); ++m) {
        const auto& s = setups[m];
        const std::string name = graph::model_name(s.kind);
        const double truth = s.params.beta_P;
        std::vector<int> covered(s.specs.size(), 0), excluded(s.specs.size(), 0), ok(s.specs.size(), 0);
        std::vector<double> sum(s.specs.size(), 0.0);
        std::map<std::string, int> rejected;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& row = results[m * reps + r];
            std::vector<estimation::EstimateResult> usable;
            for (std::size_t e = 0; e < s.specs.size(); ++e) {
                const auto& est = row[e];
                const bool fine = est.error.empty();
                const bool covers = fine && est.lo <= truth && truth <= est.hi;
                if (fine) {
                    ++ok[e];
                    covered[e] += covers ? 1 : 0;
                    excluded[e] += covers ? 0 : 1;
                    sum[e] += est.beta;
                    usable.push_back(est.full);
                }
                out.table.add({name, static_cast<long long>(r), static_cast<long long>(cfg.seed_base + r),
                               s.specs[e].label, static_cast<long long>(s.verdicts[e].civ1),
                               static_cast<long long>(s.verdicts[e].civ2),
                               static_cast<long long>(s.verdicts[e].valid()), est.beta, est.se, est.lo,
                               est.hi, static_cast<long long>(covers),
                               static_cast<long long>(est.civ3_pass), est.error});
            }
            if (usable.size() >= 2) {
                const auto report = estimation::overlap_analysis(std::move(usable), validity);
                for (const auto& rej : report.rejections) rejected[rej.model] += rej.rejected ? 1 : 0;
            }
        }
        for (std::size_t e = 0; e < s.specs.size(); ++e) {
            const double n = ok[e] > 0 ? ok[e] : kNaN;
            out.summary.add({name, s.specs[e].label, static_cast<long long>(s.verdicts[e].valid()),
                             covered[e] / n, excluded[e] / n, sum[e] / n, static_cast<long long>(ok[e])});
        }
        json per_model = json::object();
        for (const auto& [model, count] : rejected) per_model[model] = static_cast<double>(count) / reps;
        rejections[name] = per_model;
    }
    out.meta = provenance(cfg);
    out.meta["rejection_rate_by_data_model"] = rejections;
    json params = json::object();
    for (const auto& s : setups) params[graph::model_name(s.kind)] = s.params;
    out.meta["params"] = params;
    json verdicts = json::object();
    for (const auto& s : setups) {
        json v = json::object();
        for (std::size_t e = 0; e < s.specs.size(); ++e) {
            v[s.specs[e].label] = {{"civ1", s.verdicts[e].civ1},
                                   {"civ2", s.verdicts[e].civ2},
                                   {"witness", s.verdicts[e].witness_rendered}};
        }
        verdicts[graph::model_name(s.kind)] = v;
    }
    out.meta["graph_verdicts"] = verdicts;
    return out;
}

ExperimentOutput run_bias_heatmap(const ExperimentConfig& cfg) {
    cfg.validate();
    const ModelKind kind = cfg.models.front();
    const std::string key = memory_key(kind);
    const auto spec = estimation::catalogue(cfg.estimators.front(), cfg.lag_depth);
    const scm::ModelParams base = experiment_params(kind, cfg.params);

    const std::size_t nw = cfg.wind_grid.size(), nm = cfg.memory_grid.size();
    const std::size_t reps = static_cast<std::size_t>(cfg.replicates);
    auto cell_params = [&](std::size_t cell) {
        scm::ModelParams p = with_wind_memory(base, cfg.wind_grid[cell / nm]);
        p.set(key, json(cfg.memory_grid[cell % nm]).dump());
        return scm::with_intercept(kind, p, kTargetDemand);
    };
    const auto errors = parallel_map(nw * nm * reps, cfg.threads, [&](std::size_t item) {
        const auto p = cell_params(item / reps);
        const auto ds = simulate_once(kind, p, cfg.T, cfg.seed_base + item % reps);
        const auto est = try_estimate(ds, spec);
        return est.error.empty() ? std::abs(pct_error(est.beta, p.beta_P)) : kNaN;
    });

    ExperimentOutput out;
    out.name = experiment_name(cfg.id);
    out.table.header = {"wind_ar", key, "mean_abs_pct_error", "replicates", "failures"};
    for (std::size_t cell = 0; cell < nw * nm; ++cell) {
        double sum = 0.0;
        long long ok = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            const double e = errors[cell * reps + r];
            if (std::isfinite(e)) {
                sum += e;
                ++ok;
            }
        }
        out.table.add({cfg.wind_grid[cell / nm], cfg.memory_grid[cell % nm], ok > 0 ? sum / ok : kNaN,
                       static_cast<long long>(reps), static_cast<long long>(reps) - ok});
    }
    out.meta = provenance(cfg);
    out.meta["model"] = graph::model_name(kind);
    out.meta["params"] = base;
    out.meta["wind_noise"] = "sigma_W scaled so the stationary wind variance is constant across the grid";
    return out;
}

ExperimentOutput run_observed_ar(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto spec = estimation::catalogue(cfg.estimators.front(), cfg.lag_depth);
    const std::size_t draws = static_cast<std::size_t>(cfg.draws);
    const auto rows = parallel_map(cfg.models.size() * draws, cfg.threads, [&](std::size_t item) {
        const ModelKind kind = cfg.models[item / draws];
        const std::uint64_t seed = cfg.seed_base + item % draws;
        const std::string key = memory_key(kind);
        const auto range = cfg.coefficient_ranges.count(key) ? cfg.coefficient_ranges.at(key)
                                                             : std::pair<double, double>{0.0, 0.0};
        // The coefficient draw uses its own stream so it does not shift the simulation's noise.
        std::mt19937_64 coef_rng(seed ^ 0x9E3779B97F4A7C15ULL);
        const double coef = std::uniform_real_distribution<double>(range.first, range.second)(coef_rng);
        scm::ModelParams p = experiment_params(kind, cfg.params);
        p.set(key, json(coef).dump());
        p = scm::with_intercept(kind, p, kTargetDemand);
        const auto ds = simulate_once(kind, p, cfg.T, seed);
        const double alpha = scm::observed_autocorrelation(ds.column("D"), 1);
        const auto est = try_estimate(ds, spec);
        const double err = est.error.empty() ? pct_error(est.beta, p.beta_P) : kNaN;
        return std::vector<Cell>{graph::model_name(kind), static_cast<long long>(item % draws),
                                 static_cast<long long>(seed), key, coef, alpha, err, std::abs(err),
                                 spec.label};
    });
    ExperimentOutput out;
    out.name = experiment_name(cfg.id);
    out.table.header = {"model", "draw", "seed", "coefficient", "value", "alpha_D1", "pct_error",
                        "abs_pct_error", "estimator"};
    for (const auto& r : rows) out.table.add(r);
    out.summary.header = {"model", "draws", "median_abs_pct_error", "max_abs_pct_error"};
    for (std::size_t m = 0; m < cfg.models.size(); ++m) {
        std::vector<double> errs;
        for (std::size_t d = 0; d < draws; ++d) {
            const double e = out.table.number(m * draws + d, "abs_pct_error");
            if (std::isfinite(e)) errs.push_back(e);
        }
        double median = kNaN, worst = kNaN;
        if (!errs.empty()) {
            std::sort(errs.begin(), errs.end());
            const std::size_t h = errs.size() / 2;
            median = errs.size() % 2 ? errs[h] : 0.5 * (errs[h - 1] + errs[h]);
            worst = errs.back();
        }
        out.summary.add({graph::model_name(cfg.models[m]), static_cast<long long>(errs.size()), median, worst});
    }
    out.meta = provenance(cfg);
    return out;
}

ExperimentOutput run_indicators(const ExperimentConfig& cfg) {
    cfg.validate();
    const ModelKind kind = cfg.models.front();
    const scm::ModelParams p = experiment_params(kind, cfg.params);
    std::vector<EstimatorSpec> specs;
    for (const auto& label : cfg.estimators) specs.push_back(estimation::catalogue(label, cfg.lag_depth));
    const std::size_t reps = static_cast<std::size_t>(cfg.replicates);
    const std::size_t sizes = cfg.sizes_years.size();
    auto hours = [&](std::size_t s) {
        return static_cast<int>(std::lround(cfg.sizes_years[s] * kHoursPerYear));
    };
    const auto results = parallel_map(sizes * reps, cfg.threads, [&](std::size_t item) {
        const auto ds = simulate_once(kind, p, hours(item / reps), cfg.seed_base + item % reps);
        std::vector<Estimate> out;
        for (const auto& spec : specs) out.push_back(try_estimate(ds, spec));
        return out;
    });

    ExperimentOutput out;
    out.name = experiment_name(cfg.id);
    out.table.header = {"model",    "estimator",          "years",          "sample_size",
                        "coverage", "avg_abs_pct_error", "mean_ci_length", "replicates", "failures"};
    for (std::size_t e = 0; e < specs.size(); ++e) {
        for (std::size_t s = 0; s < sizes; ++s) {
            long long ok = 0, covered = 0;
            double err = 0.0, length = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                const auto& est = results[s * reps + r][e];
                if (!est.error.empty()) continue;
                ++ok;
                covered += (est.lo <= p.beta_P && p.beta_P <= est.hi) ? 1 : 0;
                err += std::abs(pct_error(est.beta, p.beta_P));
                length += est.hi - est.lo;
            }
            const double n = ok > 0 ? static_cast<double>(ok) : kNaN;
            out.table.add({graph::model_name(kind), specs[e].label, cfg.sizes_years[s],
                           static_cast<long long>(hours(s)), covered / n, err / n, length / n,
                           static_cast<long long>(reps), static_cast<long long>(reps) - ok});
        }
    }
    out.meta = provenance(cfg);
    out.meta["model"] = graph::model_name(kind);
    out.meta["params"] = p;
    return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.id) {
        case ExperimentId::ValidityPanel: return run_validity_panel(cfg);
        case ExperimentId::BiasHeatmap: return run_bias_heatmap(cfg);
        case ExperimentId::ObservedAr: return run_observed_ar(cfg);
        case ExperimentId::Indicators: return run_indicators(cfg);
    }
    throw std::logic_error("unhandled experiment");
}

std::vector<std::filesystem::path> write_outputs(const ExperimentOutput& out,
                                                 const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files;
    auto open = [&](const std::string& file) {
        const auto path = dir / file;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        files.push_back(path);
        return f;
    };
    const FigureAssets assets = emit_figure_assets(out.table, figure_style_for(out.name));
    {
        auto f = open(out.name + ".csv");
        f << assets.csv;
    }
    if (!out.summary.rows.empty()) {
        auto f = open(out.name + ".summary.csv");
        write_csv(f, out.summary);
    }
    {
        auto f = open(out.name + ".svg");
        f << assets.svg;
    }
    {
        auto f = open(out.name + ".meta.json");
        f << out.meta.dump(2) << '\n';
    }
    return files;
}

}  // namespace civ::experiments
