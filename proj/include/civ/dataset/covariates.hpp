#pragma once

#include <string>
#include <vector>

#include "civ/timeseries.hpp"
#include "json.hpp"

namespace civ::dataset {

/**
 * Calendar and weather controls for the application study.
 *
 * One-hot groups drop their first level as reference: hour of week
 * (Monday 00:00 is the reference, 167 columns), month (January, 11 columns)
 * and year (first year in the data). Daily inputs arrive once per day and are
 * carried forward to the remaining hours.
 */
struct CovariateOptions {
    bool hour_of_week = true;
    bool month = true;
    bool year = true;
    /// Drop rows whose holiday_fraction equals 1 (country-wide holidays).
    bool drop_full_holidays = true;
    /// Continuous columns passed through; empty means every documented optional column present.
    std::vector<std::string> continuous;
    /// Columns forward-filled from their last observed value.
    std::vector<std::string> daily{"gas", "coal", "eua", "heating_degrees", "cooling_degrees",
                                   "holiday_fraction", "school_holiday_fraction", "sunlight"};
    /// Optional inclusive date filter, "YYYY-MM-DD" (empty = unbounded).
    std::string date_from, date_to;
};

/// Throws std::invalid_argument on unknown keys or wrongly typed values.
[[nodiscard]] CovariateOptions parse_covariate_options(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const CovariateOptions& o);

struct CovariateSet {
    TimeSeriesDataset data;
    /// Names of the covariate columns added to or passed through in `data`.
    std::vector<std::string> columns;
    std::size_t holiday_rows_dropped = 0;
    std::size_t date_rows_dropped = 0;
};

/// Requires timestamps. One-hot columns that end up all zero are omitted.
[[nodiscard]] CovariateSet build_covariates(const TimeSeriesDataset& ds, const CovariateOptions& opts = {});

/// Adds "X[-k]" columns (k = 1..max_lag) resolved by hour index; unavailable values are NaN.
[[nodiscard]] TimeSeriesDataset materialize_lags(const TimeSeriesDataset& ds,
                                                 const std::vector<std::string>& columns, int max_lag);

enum class SplitRule { All, OnPeak, OffPeak, Both };

/// "all", "onpeak", "offpeak", "both".
[[nodiscard]] SplitRule parse_split_rule(const std::string& s);
[[nodiscard]] std::string split_name(SplitRule r);

/// On-peak hours are 8:00-19:59 local time.
[[nodiscard]] bool is_on_peak(const std::string& timestamp);

struct LagSpec {
    std::vector<std::string> columns{"W", "P", "D"};
    int max_lag = 1;
};

/**
 * Lags are computed on the complete series first and the split is applied
 * afterwards, so on-peak rows keep lag values reaching into off-peak hours.
 * Both yields {on-peak, off-peak}; the other rules yield one dataset.
 */
[[nodiscard]] std::vector<TimeSeriesDataset> lags_then_split(const TimeSeriesDataset& ds,
                                                             const LagSpec& lags, SplitRule rule);
[[nodiscard]] std::vector<TimeSeriesDataset> split(const TimeSeriesDataset& ds, SplitRule rule);

}  // namespace civ::dataset
