#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "civ/timeseries.hpp"
#include "json.hpp"

namespace civ::dataset {

/**
 * Synthetic market with a known demand slope: the inertial-demand recursion
 * plus observed calendar, weather, fuel-price and holiday shifters. Daily
 * inputs are only filled at midnight, like files that carry one value per day.
 */
struct FixtureConfig {
    int years = 2;
    int start_year = 2017;
    std::uint64_t seed = 20170101;
    double beta_P = -100.0;
    double beta_D1 = 0.7;
    double wind_ar = 0.9;
};

/// Loader-shaped dataset: D, P, W plus solar, gas, heating_degrees,
/// cooling_degrees, holiday_fraction, school_holiday_fraction, with timestamps.
[[nodiscard]] TimeSeriesDataset generate_fixture(const FixtureConfig& cfg = {});

/// Count, mean, sd, min, max of each named column over finite entries.
[[nodiscard]] nlohmann::json summary_statistics(const TimeSeriesDataset& ds,
                                                const std::vector<std::string>& columns);

}  // namespace civ::dataset
