#include "civ/cli/dispatch.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <typeinfo>

#include "CLI11.hpp"
#include "civ/cli/manifest.hpp"
#include "civ/dataset/application.hpp"
#include "civ/dataset/covariates.hpp"
#include "civ/dataset/fixture.hpp"
#include "civ/dataset/market_csv.hpp"
#include "civ/estimation/catalogue.hpp"
#include "civ/estimation/civ.hpp"
#include "civ/estimation/overlap.hpp"
#include "civ/estimation/report.hpp"
#include "civ/estimation/transforms.hpp"
#include "civ/experiments/experiments.hpp"
#include "civ/graph/builtin.hpp"
#include "civ/graph/civ_check.hpp"
#include "civ/graph/graph_text.hpp"
#include "civ/scm/model.hpp"
#include "civ/scm/params_json.hpp"
#include "civ/scm/simulate.hpp"
#include "json.hpp"

namespace civ::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad flag values or config contents detected after CLI11 parsing.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::string error_class(const std::exception& e) {
    using namespace dataset;
    if (dynamic_cast<const EmptyFileError*>(&e)) return "EmptyFileError";
    if (dynamic_cast<const MissingColumnError*>(&e)) return "MissingColumnError";
    if (dynamic_cast<const DuplicateTimestampError*>(&e)) return "DuplicateTimestampError";
    if (dynamic_cast<const SpacingError*>(&e)) return "SpacingError";
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const estimation::CollinearInstrumentsError*>(&e)) return "CollinearInstrumentsError";
    if (dynamic_cast<const estimation::Civ3FailureError*>(&e)) return "Civ3FailureError";
    if (dynamic_cast<const UsageError*>(&e)) return "UsageError";
    if (dynamic_cast<const json::exception*>(&e)) return "JsonError";
    if (dynamic_cast<const std::invalid_argument*>(&e)) return "InvalidArgument";
    return "RuntimeError";
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& cls, const std::string& message,
                int code) {
    err << json{{"error", {{"kind", kind}, {"class", cls}, {"message", message}, {"exit_code", code}}}}.dump()
        << '\n';
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

std::uint64_t fresh_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) out.push_back(tok);
        }
    }
    return out;
}

/// Wraps config resolution so that bad values surface as usage errors.
template <class F>
auto resolve(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const UsageError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const json::exception& e) {
        throw UsageError(e.what());
    }
}

// ---------------------------------------------------------------------------
// Per-subcommand state. Options bind into these before parsing.

struct SimulateArgs {
    std::string model;
    int T = 43'800;
    std::optional<int> burn_in;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> params;
    std::optional<std::string> params_json;
    bool keep_latent = false;
};

struct GraphSource {
    std::optional<std::string> model;
    std::optional<std::string> graph_file;
};

struct GraphCheckArgs {
    GraphSource source;
    std::vector<std::string> estimators;
    std::optional<int> L;
    int window = 0;
};

struct GraphDsepArgs {
    GraphSource source;
    std::string a, b;
    std::string given;
    int window = 0;
};

struct GraphShowArgs {
    GraphSource source;
    std::string format = "text";
};

struct EstimateArgs {
    std::string data;
    std::vector<std::string> estimators{"#8"};
    int L = 50;
    bool loglog = false;
    std::optional<std::string> covariates;
    int bandwidth = -1;
    double civ3_tol = -1.0;
    std::optional<std::string> csv;
};

struct ExperimentArgs {
    std::string name;
    std::string preset = "desk";
    std::optional<std::string> config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<int> T;
    std::optional<int> replicates;
};

struct AppArgs {
    std::string data;
    std::string spec = "linear";
    int L = 50;
    std::string split = "all";
    std::optional<std::string> out;
    std::optional<std::string> covariates;
    bool no_covariates = false;
    std::vector<std::string> estimators;
    int bandwidth = -1;
};

struct FixtureArgs {
    std::string out;
    int years = 2;
    int start_year = 2017;
    std::uint64_t seed = dataset::FixtureConfig{}.seed;
};

struct Outcome {
    RunManifest manifest;
    std::optional<fs::path> out_dir;
    std::optional<fs::path> out_file;
};

// ---------------------------------------------------------------------------

Outcome run_simulate(const SimulateArgs& a, std::ostream& out) {
    const auto kind = resolve([&] { return graph::parse_model_kind(a.model); });
    std::map<std::string, std::string> overrides;
    json file_params = json::object();
    if (a.params_json) {
        file_params = read_json_file(*a.params_json);
        if (!file_params.is_object()) throw UsageError("params file must hold a JSON object");
        for (const auto& [k, v] : file_params.items()) {
            if (v.is_array()) {
                std::string joined;
                for (const auto& x : v) joined += (joined.empty() ? "" : ",") + json(x.get<double>()).dump();
                overrides[k] = joined;
            } else if (v.is_number()) {
                overrides[k] = v.dump();
            } else {
                throw UsageError("params file: value of '" + k + "' must be a number or list");
            }
        }
    }
    for (const auto& kv : a.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + kv + "'");
        overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    const auto params = resolve([&] {
        auto p = experiments::experiment_params(kind, overrides);
        scm::validate(kind, p);
        return p;
    });
    if (a.T < 1) throw UsageError("--T must be positive");
    const int burn = a.burn_in.value_or(experiments::burn_in_for(kind, params));
    if (burn < 0) throw UsageError("--burn-in must be non-negative");

    scm::SimulationConfig cfg;
    cfg.T = a.T;
    cfg.burn_in = burn;
    cfg.seed = a.seed.value_or(fresh_seed());
    cfg.keep_latent = a.keep_latent;
    const auto [spec, g] = scm::build_model(kind, params);
    const auto sim = scm::simulate(spec, cfg);

    Outcome o;
    if (a.out) {
        std::ofstream f(*a.out);
        if (!f) throw std::runtime_error("cannot write '" + *a.out + "'");
        dataset::write_series_csv(f, sim.data);
        o.out_file = *a.out;
        o.manifest.outputs.push_back(*a.out);
    } else {
        dataset::write_series_csv(out, sim.data);
    }
    json pj;
    scm::to_json(pj, params);
    o.manifest.config = {{"model", graph::model_name(kind)}, {"T", cfg.T},          {"burn_in", cfg.burn_in},
                         {"keep_latent", cfg.keep_latent},   {"params", pj}};
    o.manifest.seeds = {cfg.seed};
    return o;
}

graph::RolledTimeGraph load_source(const GraphSource& s, bool allow_all = false) {
    if (s.graph_file && s.model) throw UsageError("give either --model or --graph, not both");
    if (s.graph_file) {
        return resolve([&] { return graph::load_rolled_graph(*s.graph_file); });
    }
    if (!s.model) throw UsageError("one of --model or --graph is required");
    if (allow_all && *s.model == "all") throw UsageError("internal: 'all' handled by caller");
    return resolve([&] { return graph::builtin_graph(graph::parse_model_kind(*s.model)); });
}

json verdict_json(const graph::RolledTimeGraph& g, const EstimatorSpec& spec, int L, const graph::CivVerdict& v) {
    json j{{"model", g.name()},       {"estimator", spec.label},
           {"L", L},     {"civ1", v.civ1},
           {"civ2", v.civ2},          {"valid", v.valid()},
           {"witness", v.witness_rendered.empty() ? json(nullptr) : json(v.witness_rendered)},
           {"witness_path", v.witness_path},
           {"window", v.window}};
    j["witness_descendant"] = v.witness_descendant ? json(*v.witness_descendant) : json(nullptr);
    return j;
}

Outcome run_graph_check(const GraphCheckArgs& a, std::ostream& out) {
    std::vector<graph::RolledTimeGraph> graphs;
    if (a.source.model && *a.source.model == "all" && !a.source.graph_file) {
        for (auto k : {graph::ModelKind::InertialDemand, graph::ModelKind::HeterogeneousDemand,
                       graph::ModelKind::DemandShifting}) {
            graphs.push_back(graph::builtin_graph(k));
        }
    } else {
        graphs.push_back(load_source(a.source));
    }
    auto labels = split_list(a.estimators);
    if (labels.size() == 1 && labels.front() == "all") labels = estimation::catalogue_labels();
    if (labels.empty()) throw UsageError("--estimator is required");
    if (a.window < 0) throw UsageError("--window must be non-negative");

    json results = json::array();
    for (const auto& g : graphs) {
        // "Up to L" estimators use twice the graph's largest lag unless told otherwise.
        const int L = a.L.value_or(std::max(1, 2 * g.max_lag()));
        for (const auto& label : labels) {
            const auto spec = resolve([&] { return estimation::catalogue(label, L); });
            const auto v = graph::check_civ_graphical(g, spec, {a.window, true});
            results.push_back(verdict_json(g, spec, L, v));
        }
    }
    out << (results.size() == 1 ? results.front() : results).dump(2) << '\n';
    Outcome o;
    o.manifest.config = {{"model", a.source.model ? json(*a.source.model) : json(nullptr)},
                         {"graph", a.source.graph_file ? json(*a.source.graph_file) : json(nullptr)},
                         {"estimators", labels},
                         {"L", a.L ? json(*a.L) : json("2*max_lag")},
                         {"window", a.window}};
    return o;
}

std::vector<std::pair<std::string, int>> parse_nodes(const std::string& text) {
    std::vector<std::pair<std::string, int>> out;
    for (const auto& tok : split_list({text})) {
        const auto at = tok.find('@');
        if (at == std::string::npos || at == 0) {
            throw UsageError("node '" + tok + "' must look like NAME@TIME, e.g. W@-1");
        }
        int t = 0;
        try {
            std::size_t used = 0;
            t = std::stoi(tok.substr(at + 1), &used);
            if (used != tok.size() - at - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw UsageError("node '" + tok + "' has a non-integer time");
        }
        out.emplace_back(tok.substr(0, at), t);
    }
    return out;
}

Outcome run_graph_dsep(const GraphDsepArgs& a, std::ostream& out) {
    const auto g = load_source(a.source);
    graph::RelativeQuery q{parse_nodes(a.a), parse_nodes(a.b), parse_nodes(a.given)};
    if (q.a.empty() || q.b.empty()) throw UsageError("--a and --b must name at least one node");
    const auto r = resolve([&] { return graph::d_separated_relative(g, q, {a.window, true}); });
    json j{{"graph", g.name()},
           {"a", a.a},
           {"b", a.b},
           {"given", a.given},
           {"separated", r.separated},
           {"witness", r.witness_rendered.empty() ? json(nullptr) : json(r.witness_rendered)},
           {"witness_path", r.witness_path},
           {"window", r.window}};
    out << j.dump(2) << '\n';
    Outcome o;
    o.manifest.config = {{"graph", g.name()}, {"a", a.a}, {"b", a.b}, {"given", a.given}, {"window", a.window}};
    return o;
}

Outcome run_graph_show(const GraphShowArgs& a, std::ostream& out) {
    const auto g = load_source(a.source);
    if (a.format == "text") {
        out << graph::format_rolled_graph(g);
    } else if (a.format == "json") {
        json comps = json::array();
        for (const auto& c : g.components()) comps.push_back({{"name", c.name}, {"observed", c.observed}});
        json edges = json::array();
        for (const auto& e : g.edges()) {
            edges.push_back({{"kind", e.kind == graph::EdgeKind::Directed ? "directed" : "bidirected"},
                             {"source", g.components()[static_cast<std::size_t>(e.source)].name},
                             {"lag", e.lag},
                             {"target", g.components()[static_cast<std::size_t>(e.target)].name}});
        }
        out << json{{"name", g.name()}, {"max_lag", g.max_lag()}, {"components", comps}, {"edges", edges}}.dump(2)
            << '\n';
    } else {
        throw UsageError("--format must be text or json");
    }
    Outcome o;
    o.manifest.config = {{"graph", g.name()}, {"format", a.format}};
    return o;
}

Outcome run_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
    auto labels = split_list(a.estimators);
    if (labels.size() == 1 && labels.front() == "all") labels = estimation::catalogue_labels();
    if (labels.empty()) throw UsageError("--estimator needs at least one label");
    if (a.L < 1) throw UsageError("--L must be at least 1");
    std::vector<EstimatorSpec> specs;
    for (const auto& l : labels) specs.push_back(resolve([&] { return estimation::catalogue(l, a.L); }));

    dataset::LoadReport report;
    TimeSeriesDataset ds = dataset::load_any_csv(a.data, &report);
    if (report.dst_dropped > 0 || report.dst_missing > 0) {
        err << "note: DST handling dropped " << report.dst_dropped << " repeated row(s), tolerated "
            << report.dst_missing << " missing hour(s)\n";
    }

    int max_lag = 0;
    for (const auto& s : specs) max_lag = std::max(max_lag, s.max_lag());
    ds = dataset::materialize_lags(ds, {"W", "P", "D"}, max_lag);

    estimation::EstimateOptions opts;
    opts.bandwidth = a.bandwidth;
    opts.civ3_tol = a.civ3_tol;
    json cov_config = nullptr;
    if (a.covariates) {
        cov_config = read_json_file(*a.covariates);
        if (cov_config.is_array()) {
            opts.design.covariates = resolve([&] { return cov_config.get<std::vector<std::string>>(); });
        } else {
            const auto copts = resolve([&] { return dataset::parse_covariate_options(cov_config); });
            auto set = dataset::build_covariates(ds, copts);
            ds = std::move(set.data);
            opts.design.covariates = std::move(set.columns);
        }
        for (const auto& c : opts.design.covariates) {
            if (!ds.has(c)) throw UsageError("covariate column '" + c + "' is not in the data");
        }
    }
    if (a.loglog) ds = estimation::loglog_transform(ds);

    Outcome o;
    o.manifest.config = {{"data", a.data},         {"estimators", labels},       {"L", a.L},
                         {"loglog", a.loglog},     {"covariates", cov_config},   {"bandwidth", a.bandwidth},
                         {"civ3_tol", a.civ3_tol}, {"csv", a.csv ? json(*a.csv) : json(nullptr)}};

    if (specs.size() == 1) {
        const auto r = estimation::civ_estimate(ds, specs.front(), opts);
        out << estimation::to_json(r).dump(2) << '\n';
        return o;
    }

    json rows = json::array();
    std::vector<estimation::EstimateResult> ok;
    std::vector<std::pair<std::string, std::string>> failures;
    for (const auto& spec : specs) {
        try {
            auto r = estimation::civ_estimate(ds, spec, opts);
            rows.push_back(estimation::to_json(r));
            ok.push_back(std::move(r));
        } catch (const std::exception& e) {
            rows.push_back({{"estimator", spec.label}, {"error", e.what()}, {"error_class", error_class(e)}});
            failures.emplace_back(spec.label, e.what());
        }
    }
    json overlap = nullptr;
    if (ok.size() >= 2) {
        std::vector<std::string> ok_labels;
        for (const auto& r : ok) ok_labels.push_back(r.label);
        overlap = estimation::to_json(
            estimation::overlap_analysis(ok, dataset::catalogue_validity(ok_labels, a.L)));
    }
    out << json{{"estimates", rows}, {"overlap", overlap}}.dump(2) << '\n';

    if (a.csv) {
        std::ofstream f(*a.csv);
        if (!f) throw std::runtime_error("cannot write '" + *a.csv + "'");
        f << "estimator,beta_hat,se,ci_lower,ci_upper,n_used,civ3_pass,error\n";
        char buf[128];
        for (const auto& r : ok) {
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g", r.effect(), r.se(0), r.lower(), r.upper());
            f << r.label << ',' << buf << ',' << r.n_used << ',' << (r.civ3_pass ? 1 : 0) << ",\n";
        }
        for (const auto& [label, msg] : failures) {
            std::string m = msg;
            for (auto& c : m) {
                if (c == '"') c = '\'';
            }
            f << label << ",,,,,,,\"" << m << "\"\n";
        }
        o.out_file = *a.csv;
        o.manifest.outputs.push_back(*a.csv);
    }
    return o;
}

fs::path output_dir(const std::optional<std::string>& flag) {
    if (flag) return *flag;
    if (auto env = default_output_dir()) return *env;
    throw UsageError("--out is required (or set CIV_OUTPUT_DIR)");
}

Outcome run_experiment_cmd(const ExperimentArgs& a, std::ostream& out) {
    // Precedence: flags > config file > built-in preset.
    auto cfg = resolve([&] {
        auto c = experiments::preset(experiments::parse_experiment(a.name), a.preset);
        if (a.config) experiments::merge_json(c, read_json_file(*a.config));
        if (a.seed) c.seed_base = *a.seed;
        if (a.threads) c.threads = *a.threads;
        if (a.T) c.T = *a.T;
        if (a.replicates) c.replicates = *a.replicates;
        c.validate();
        return c;
    });
    const fs::path dir = output_dir(a.out);
    fs::create_directories(dir);
    const auto result = experiments::run_experiment(cfg);
    const auto files = experiments::write_outputs(result, dir);

    Outcome o;
    o.out_dir = dir;
    for (const auto& f : files) o.manifest.outputs.push_back(f.string());
    json resolved;
    experiments::to_json(resolved, cfg);
    o.manifest.config = resolved;
    // Every cell reuses the same seeds: one per replicate, or one per draw.
    const int n_seeds = cfg.id == experiments::ExperimentId::ObservedAr ? cfg.draws : cfg.replicates;
    for (int r = 0; r < n_seeds; ++r) o.manifest.seeds.push_back(cfg.seed_base + static_cast<std::uint64_t>(r));
    out << json{{"experiment", result.name}, {"outputs", o.manifest.outputs}, {"meta", result.meta}}.dump(2)
        << '\n';
    return o;
}

Outcome run_app(const AppArgs& a, std::ostream& out, std::ostream& err) {
    dataset::ApplicationConfig cfg;
    resolve([&] {
        cfg.lag_depth = a.L;
        cfg.spec = dataset::parse_spec_kind(a.spec);
        cfg.split = dataset::parse_split_rule(a.split);
        cfg.estimators = split_list(a.estimators);
        for (const auto& l : cfg.estimators) (void)estimation::catalogue(l, std::max(a.L, 1));
        cfg.use_covariates = !a.no_covariates;
        if (a.covariates) cfg.covariates = dataset::parse_covariate_options(read_json_file(*a.covariates));
        cfg.bandwidth = a.bandwidth;
        if (cfg.lag_depth < 1) throw UsageError("--L must be at least 1");
        return 0;
    });
    dataset::LoadReport report;
    const auto ds = dataset::load_market_csv(fs::path(a.data), {}, &report);
    err << "loaded " << ds.rows() << " rows; DST: dropped " << report.dst_dropped << ", missing "
        << report.dst_missing << '\n';
    const auto result = dataset::run_application(ds, cfg);
    const json j = dataset::to_json(result);

    Outcome o;
    if (a.out || default_output_dir()) {
        const fs::path dir = output_dir(a.out);
        fs::create_directories(dir);
        const auto json_path = dir / "application.json";
        const auto csv_path = dir / "application_estimates.csv";
        std::ofstream(json_path) << j.dump(2) << '\n';
        std::ofstream csv(csv_path);
        dataset::write_estimates_csv(csv, result);
        o.out_dir = dir;
        o.manifest.outputs = {json_path.string(), csv_path.string()};
    }
    out << j.dump(2) << '\n';
    o.manifest.config = result.config;
    o.manifest.config["data"] = a.data;
    return o;
}

Outcome run_fixture(const FixtureArgs& a, std::ostream& out) {
    if (a.years < 1) throw UsageError("--years must be at least 1");
    dataset::FixtureConfig cfg;
    cfg.years = a.years;
    cfg.start_year = a.start_year;
    cfg.seed = a.seed;
    const auto ds = dataset::generate_fixture(cfg);
    {
        std::ofstream f(a.out);
        if (!f) throw std::runtime_error("cannot write '" + a.out + "'");
        dataset::write_market_csv(f, ds);
    }
    out << dataset::summary_statistics(ds, {"D", "P", "W"}).dump(2) << '\n';
    Outcome o;
    o.out_file = a.out;
    o.manifest.outputs = {a.out};
    o.manifest.seeds = {cfg.seed};
    o.manifest.config = {{"years", cfg.years},     {"start_year", cfg.start_year}, {"beta_P", cfg.beta_P},
                         {"beta_D1", cfg.beta_D1}, {"wind_ar", cfg.wind_ar}};
    return o;
}

void add_graph_source(CLI::App* sub, GraphSource& s, bool allow_all) {
    sub->add_option("--model", s.model,
                    allow_all ? "Built-in model: model1|model2|model3 (or I/II/III, or all)"
                              : "Built-in model: model1|model2|model3 (or I/II/III)");
    sub->add_option("--graph", s.graph_file, "Rolled graph text file");
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Conditional instrumental variable toolkit for time series", "civ"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Simulate a structural model and write t,W,P,D[,A,B] CSV");
    c_sim->add_option("--model", sim.model, "Model I, II or III")->required();
    c_sim->add_option("--T", sim.T, "Number of hours to keep")->capture_default_str();
    c_sim->add_option("--burn-in", sim.burn_in, "Discarded warm-up steps (default: from persistence)");
    c_sim->add_option("--seed", sim.seed, "RNG seed (chosen and recorded if omitted)");
    c_sim->add_option("--out", sim.out, "Output CSV (stdout if omitted)");
    c_sim->add_option("--param", sim.params, "Parameter override key=value (repeatable)");
    c_sim->add_option("--params-json", sim.params_json, "JSON file of parameter overrides");
    c_sim->add_flag("--keep-latent", sim.keep_latent, "Also write latent A and B (Model II)");

    auto* c_graph = app.add_subcommand("graph", "Graph queries");
    c_graph->require_subcommand(1);
    GraphCheckArgs gc;
    auto* c_check = c_graph->add_subcommand("check", "Graphical CIV1/CIV2 check of catalogue estimators");
    add_graph_source(c_check, gc.source, true);
    c_check->add_option("--estimator", gc.estimators, "Estimator label(s), e.g. 3, #3, 1,2,8 or all")->required();
    c_check->add_option("--L", gc.L, "Lag depth for 'up to L' estimators (default 2*max_lag)");
    c_check->add_option("--window", gc.window, "Unrolling window (0 = automatic)");
    GraphDsepArgs gd;
    auto* c_dsep = c_graph->add_subcommand("dsep", "d-separation query with witness path");
    add_graph_source(c_dsep, gd.source, false);
    c_dsep->add_option("--a", gd.a, "Node set, e.g. W@0")->required();
    c_dsep->add_option("--b", gd.b, "Node set, e.g. D@0")->required();
    c_dsep->add_option("--given", gd.given, "Conditioning set, e.g. W@-1,W@-2");
    c_dsep->add_option("--window", gd.window, "Unrolling window (0 = automatic)");
    GraphShowArgs gs;
    auto* c_show = c_graph->add_subcommand("show", "Print a rolled graph");
    add_graph_source(c_show, gs.source, false);
    c_show->add_option("--format", gs.format, "text or json")->capture_default_str();

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate", "Closed-form CIV estimate(s) on a CSV");
    c_est->add_option("--data", est.data, "Simulated (t,...) or market (timestamp,...) CSV")->required();
    c_est->add_option("--estimator", est.estimators, "Label(s); several labels run batch mode with overlap")
        ->capture_default_str();
    c_est->add_option("--L", est.L, "Lag depth")->capture_default_str();
    c_est->add_flag("--loglog", est.loglog, "Log-transform P and D");
    c_est->add_option("--covariates", est.covariates,
                      "JSON file: list of column names, or calendar covariate options object");
    c_est->add_option("--bandwidth", est.bandwidth, "HAC bandwidth (-1 = automatic)");
    c_est->add_option("--civ3-tol", est.civ3_tol, "CIV3 tolerance (-1 = automatic)");
    c_est->add_option("--csv", est.csv, "Batch mode: also write point estimates and CI bounds here");

    auto* c_exp = app.add_subcommand("experiment", "Simulation experiments");
    c_exp->require_subcommand(1);
    ExperimentArgs ex;
    auto* c_run = c_exp->add_subcommand("run", "Run an experiment and write csv/svg/meta.json");
    c_run->add_option("--name", ex.name, "validity_panel | bias_heatmap | observed_ar | indicators")->required();
    c_run->add_option("--preset", ex.preset, "desk or paper")->capture_default_str();
    c_run->add_option("--config", ex.config, "JSON config overriding the preset");
    c_run->add_option("--out", ex.out, "Output directory (default $CIV_OUTPUT_DIR)");
    c_run->add_option("--seed", ex.seed, "Seed base (replicate r uses seed+r)");
    c_run->add_option("--threads", ex.threads, "Worker threads (default: all cores)");
    c_run->add_option("--T", ex.T, "Override series length");
    c_run->add_option("--replicates", ex.replicates, "Override replicate count");

    auto* c_app = app.add_subcommand("app", "Market data application");
    c_app->require_subcommand(1);
    AppArgs ap;
    auto* c_app_run = c_app->add_subcommand("run", "Estimate the price effect on a market CSV");
    c_app_run->add_option("--data", ap.data, "Market CSV")->required();
    c_app_run->add_option("--spec", ap.spec, "linear or loglog")->capture_default_str();
    c_app_run->add_option("--L", ap.L, "Lag depth")->capture_default_str();
    c_app_run->add_option("--split", ap.split, "all, onpeak, offpeak or both")->capture_default_str();
    c_app_run->add_option("--out", ap.out, "Output directory (default $CIV_OUTPUT_DIR, else stdout only)");
    c_app_run->add_option("--covariates", ap.covariates, "Covariate options JSON");
    c_app_run->add_flag("--no-covariates", ap.no_covariates, "Skip calendar and continuous covariates");
    c_app_run->add_option("--estimator", ap.estimators, "Estimator labels (default #1-#8)");
    c_app_run->add_option("--bandwidth", ap.bandwidth, "HAC bandwidth (-1 = automatic)");
    FixtureArgs fx;
    auto* c_fix = c_app->add_subcommand("fixture", "Write the synthetic market fixture CSV");
    c_fix->add_option("--out", fx.out, "Output CSV")->required();
    c_fix->add_option("--years", fx.years, "Years of hourly data")->capture_default_str();
    c_fix->add_option("--start-year", fx.start_year, "First calendar year")->capture_default_str();
    c_fix->add_option("--seed", fx.seed, "RNG seed")->capture_default_str();

    // CLI11 would only say that a subcommand is required; name the culprit instead.
    if (argc > 1 && argv[1][0] != '-') {
        const std::string first = argv[1];
        const auto subs = app.get_subcommands({});
        if (std::none_of(subs.begin(), subs.end(), [&](const CLI::App* s) { return s->check_name(first); })) {
            err << app.help();
            emit_error(err, "usage", "UnknownSubcommand", "unknown subcommand '" + first + "'", kUsageError);
            return kUsageError;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << app.help();
        emit_error(err, "usage", "CLI::" + e.get_name(), e.what(), kUsageError);
        return kUsageError;
    }

    std::string name;
    for (const CLI::App* a = &app; a != nullptr;) {
        const auto subs = a->get_subcommands();
        a = subs.empty() ? nullptr : subs.front();
        if (a) name += (name.empty() ? "" : " ") + a->get_name();
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        Outcome o;
        if (c_sim->parsed()) o = run_simulate(sim, out);
        else if (c_check->parsed()) o = run_graph_check(gc, out);
        else if (c_dsep->parsed()) o = run_graph_dsep(gd, out);
        else if (c_show->parsed()) o = run_graph_show(gs, out);
        else if (c_est->parsed()) o = run_estimate(est, out, err);
        else if (c_run->parsed()) o = run_experiment_cmd(ex, out);
        else if (c_app_run->parsed()) o = run_app(ap, out, err);
        else if (c_fix->parsed()) o = run_fixture(fx, out);
        else throw UsageError("no subcommand selected");

        o.manifest.subcommand = name;
        o.manifest.duration_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json m = o.manifest;
        if (auto path = manifest_path(name, o.out_dir, o.out_file)) {
            if (path->has_parent_path()) fs::create_directories(path->parent_path());
            std::ofstream f(*path);
            if (!f) throw std::runtime_error("cannot write manifest '" + path->string() + "'");
            f << m.dump(2) << '\n';
        } else {
            err << json{{"manifest", m}}.dump() << '\n';
        }
        out.flush();
        return kSuccess;
    } catch (const UsageError& e) {
        if (const CLI::App* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
            const auto nested = sub->get_subcommands();
            err << (nested.empty() ? sub : nested.front())->help();
        }
        emit_error(err, "usage", error_class(e), e.what(), kUsageError);
        return kUsageError;
    } catch (const std::exception& e) {
        emit_error(err, "runtime", error_class(e), e.what(), kRuntimeError);
        return kRuntimeError;
    }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.push_back("civ");
    for (const auto& a : args) argv.push_back(a.c_str());
    return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace civ::cli
