#include "civ/estimation/report.hpp"

namespace civ::estimation {

using nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

json to_json(const EstimateResult& r) {
    json ci = json::array();
    for (Eigen::Index i = 0; i < r.ci.rows(); ++i) ci.push_back({r.ci(i, 0), r.ci(i, 1)});
    json pi = json::array();
    for (Eigen::Index i = 0; i < r.first_stage.pi.rows(); ++i) {
        pi.push_back(vec(r.first_stage.pi.row(i).transpose()));
    }
    return {{"estimator", r.label},
            {"regressors", r.regressor_names},
            {"beta_hat", vec(r.beta_hat)},
            {"se", vec(r.se)},
            {"ci", ci},
            {"effect", {{"beta_hat", r.effect()}, {"ci", {r.lower(), r.upper()}}}},
            {"first_stage", {{"pi_hat", pi}, {"instrument_sd", vec(r.first_stage.instrument_sd)}}},
            {"civ3_sigma_min", r.civ3_sigma_min},
            {"civ3_sigma_min_std", r.civ3_sigma_min_std},
            {"civ3_pass", r.civ3_pass},
            {"n_used", r.n_used},
            {"bandwidth", r.bandwidth},
            {"dropped_covariates", r.dropped_covariates}};
}

json to_json(const OverlapReport& r) {
    json labels = json::array();
    for (const auto& e : r.estimates) labels.push_back(e.label);
    json rejections = json::object();
    for (const auto& m : r.rejections) {
        json pairs = json::array();
        for (const auto& [a, b] : m.conflicts) pairs.push_back({a, b});
        rejections[m.model] = {{"rejected", m.rejected}, {"conflicts", pairs}};
    }
    return {{"labels", labels}, {"pairwise_overlap", r.pairwise_overlap}, {"rejections", rejections}};
}

}  // namespace civ::estimation
