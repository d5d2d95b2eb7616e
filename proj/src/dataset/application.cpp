#include "civ/dataset/application.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "civ/estimation/catalogue.hpp"
#include "civ/estimation/transforms.hpp"
#include "civ/graph/builtin.hpp"
#include "civ/graph/civ_check.hpp"

namespace civ::dataset {

using nlohmann::json;

SpecKind parse_spec_kind(const std::string& s) {
    if (s == "linear") return SpecKind::Linear;
    if (s == "loglog") return SpecKind::LogLog;
    throw std::invalid_argument("unknown spec '" + s + "' (expected linear or loglog)");
}

std::string spec_kind_name(SpecKind k) { return k == SpecKind::Linear ? "linear" : "loglog"; }

std::vector<estimation::ModelValidity> catalogue_validity(const std::vector<std::string>& labels, int lag_depth) {
    std::vector<estimation::ModelValidity> out;
    for (auto kind : {graph::ModelKind::InertialDemand, graph::ModelKind::HeterogeneousDemand,
                      graph::ModelKind::DemandShifting}) {
        const auto g = graph::builtin_graph(kind);
        estimation::ModelValidity mv{graph::model_name(kind), {}};
        for (const auto& label : labels) {
            const auto spec = estimation::catalogue(label, lag_depth);
            if (graph::check_civ_graphical(g, spec).valid()) mv.valid_labels.push_back(spec.label);
        }
        out.push_back(std::move(mv));
    }
    return out;
}

ApplicationResult run_application(const TimeSeriesDataset& ds, const ApplicationConfig& cfg) {
    if (cfg.lag_depth < 1) throw std::invalid_argument("application: L must be at least 1");
    const std::vector<std::string> labels =
        cfg.estimators.empty() ? estimation::catalogue_labels() : cfg.estimators;
    std::vector<EstimatorSpec> specs;
    for (const auto& l : labels) specs.push_back(estimation::catalogue(l, cfg.lag_depth));

    ApplicationResult result;
    result.config = {{"L", cfg.lag_depth},
                     {"spec", spec_kind_name(cfg.spec)},
                     {"split", split_name(cfg.split)},
                     {"estimators", labels},
                     {"use_covariates", cfg.use_covariates},
                     {"covariates", to_json(cfg.covariates)},
                     {"bandwidth", cfg.bandwidth}};

    TimeSeriesDataset prepared = materialize_lags(ds, {"W", "P", "D"}, cfg.lag_depth);
    std::vector<std::string> covariate_columns;
    if (cfg.use_covariates) {
        auto cs = build_covariates(prepared, cfg.covariates);
        prepared = std::move(cs.data);
        covariate_columns = std::move(cs.columns);
        result.holiday_rows_dropped = cs.holiday_rows_dropped;
    }
    result.covariates = covariate_columns;

    const auto parts = split(prepared, cfg.split);
    const auto validity = catalogue_validity(labels, cfg.lag_depth);
    for (std::size_t s = 0; s < parts.size(); ++s) {
        SplitResult sr;
        sr.split = cfg.split == SplitRule::Both ? (s == 0 ? "onpeak" : "offpeak") : split_name(cfg.split);
        const TimeSeriesDataset part =
            cfg.spec == SpecKind::LogLog ? estimation::loglog_transform(parts[s]) : parts[s];
        sr.rows = part.rows();
        estimation::EstimateOptions opts;
        opts.design.covariates = covariate_columns;
        opts.bandwidth = cfg.bandwidth;
        std::vector<estimation::EstimateResult> ok;
        for (const auto& spec : specs) {
            EstimateRow row;
            row.label = spec.label;
            try {
                auto est = estimation::civ_estimate(part, spec, opts);
                row.price_change_per_sd = est.first_stage.pi(0, 0) * est.first_stage.instrument_sd(0);
                for (const auto& d : est.dropped_covariates) {
                    if (std::find(result.dropped_covariates.begin(), result.dropped_covariates.end(), d) ==
                        result.dropped_covariates.end()) {
                        result.dropped_covariates.push_back(d);
                    }
                }
                ok.push_back(est);
                row.result = std::move(est);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            sr.estimates.push_back(std::move(row));
        }
        if (ok.size() >= 2) sr.overlap = estimation::overlap_analysis(std::move(ok), validity);
        result.splits.push_back(std::move(sr));
    }
    return result;
}

json to_json(const ApplicationResult& r) {
    json splits = json::array();
    for (const auto& s : r.splits) {
        json est = json::array();
        for (const auto& row : s.estimates) {
            json e{{"estimator", row.label}};
            if (row.result) {
                const auto& x = *row.result;
                e["beta_hat"] = x.effect();
                e["se"] = x.se(0);
                e["ci"] = {x.lower(), x.upper()};
                e["n_used"] = x.n_used;
                e["first_stage"] = {{"pi_hat", x.first_stage.pi(0, 0)},
                                    {"instrument_sd", x.first_stage.instrument_sd(0)},
                                    {"price_change_per_sd", row.price_change_per_sd}};
                e["civ3_sigma_min"] = x.civ3_sigma_min;
                e["civ3_sigma_min_std"] = x.civ3_sigma_min_std;
                e["civ3_pass"] = x.civ3_pass;
            } else {
                e["error"] = row.error;
            }
            est.push_back(e);
        }
        json overlap = nullptr;
        if (s.overlap) {
            json rej = json::object();
            for (const auto& m : s.overlap->rejections) {
                json pairs = json::array();
                for (const auto& [a, b] : m.conflicts) pairs.push_back({a, b});
                rej[m.model] = {{"rejected", m.rejected}, {"conflicts", pairs}};
            }
            json labels = json::array();
            for (const auto& e : s.overlap->estimates) labels.push_back(e.label);
            overlap = {{"labels", labels}, {"pairwise_overlap", s.overlap->pairwise_overlap}, {"rejections", rej}};
        }
        splits.push_back({{"split", s.split}, {"rows", s.rows}, {"estimates", est}, {"overlap", overlap}});
    }
    return {{"config", r.config},
            {"covariate_count", r.covariates.size()},
            {"dropped_covariates", r.dropped_covariates},
            {"holiday_rows_dropped", r.holiday_rows_dropped},
            {"splits", splits}};
}

void write_estimates_csv(std::ostream& out, const ApplicationResult& r) {
    out << "split,estimator,beta_hat,se,ci_lower,ci_upper,n_used,pi_hat,instrument_sd,price_change_per_sd,"
           "civ3_sigma_min_std,civ3_pass,error\n";
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    for (const auto& s : r.splits) {
        for (const auto& row : s.estimates) {
            out << s.split << ',' << row.label << ',';
            if (row.result) {
                const auto& x = *row.result;
                out << num(x.effect()) << ',' << num(x.se(0)) << ',' << num(x.lower()) << ',' << num(x.upper())
                    << ',' << x.n_used << ',' << num(x.first_stage.pi(0, 0)) << ','
                    << num(x.first_stage.instrument_sd(0)) << ',' << num(row.price_change_per_sd) << ','
                    << num(x.civ3_sigma_min_std) << ',' << (x.civ3_pass ? 1 : 0) << ",\n";
            } else {
                std::string msg = row.error;
                for (auto& c : msg) {
                    if (c == '"') c = '\'';
                }
                out << ",,,,,,,,,,\"" << msg << "\"\n";
            }
        }
    }
}

}  // namespace civ::dataset
