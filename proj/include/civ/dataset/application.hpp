#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "civ/dataset/covariates.hpp"
#include "civ/estimation/civ.hpp"
#include "civ/estimation/overlap.hpp"
#include "civ/timeseries.hpp"
#include "json.hpp"

namespace civ::dataset {

enum class SpecKind { Linear, LogLog };

[[nodiscard]] SpecKind parse_spec_kind(const std::string& s);
[[nodiscard]] std::string spec_kind_name(SpecKind k);

struct ApplicationConfig {
    int lag_depth = 50;
    SpecKind spec = SpecKind::Linear;
    SplitRule split = SplitRule::All;
    std::vector<std::string> estimators;  // empty = #1-#8
    bool use_covariates = true;
    CovariateOptions covariates;
    int bandwidth = -1;
};

struct EstimateRow {
    std::string label;
    std::optional<estimation::EstimateResult> result;
    std::string error;
    /// pi_hat (first instrument on the effect regressor) times the residual-instrument sd.
    double price_change_per_sd = 0.0;
};

struct SplitResult {
    std::string split;
    std::size_t rows = 0;
    std::vector<EstimateRow> estimates;
    std::optional<estimation::OverlapReport> overlap;
};

struct ApplicationResult {
    std::vector<SplitResult> splits;
    std::vector<std::string> covariates;
    std::vector<std::string> dropped_covariates;
    std::size_t holiday_rows_dropped = 0;
    nlohmann::json config;
};

/// Ex-ante validity of the given estimators under Models I-III, from the graphical check.
[[nodiscard]] std::vector<estimation::ModelValidity> catalogue_validity(const std::vector<std::string>& labels,
                                                                     int lag_depth);

/**
 * Application pipeline: lags of W, P, D on the complete series, then
 * covariates and holiday filtering, then the split, then (log-log) the
 * non-positive-price filter, then each estimator with covariates in the
 * conditioning stage and the overlap analysis per split.
 */
[[nodiscard]] ApplicationResult run_application(const TimeSeriesDataset& ds, const ApplicationConfig& cfg);

[[nodiscard]] nlohmann::json to_json(const ApplicationResult& r);
/// split, estimator, beta_hat, se, ci_lower, ci_upper, n_used, pi_hat, instrument_sd,
/// price_change_per_sd, civ3_sigma_min_std, civ3_pass, error
void write_estimates_csv(std::ostream& out, const ApplicationResult& r);

}  // namespace civ::dataset
