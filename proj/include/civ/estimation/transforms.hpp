#pragma once

#include <string>

#include "civ/timeseries.hpp"

namespace civ::estimation {

/**
 * Log-log preparation: rows with price <= 0 (or demand <= 0) are dropped and
 * every price/demand column, including materialized lags such as "P[-3]", is
 * replaced by its natural log. Non-positive lagged values become NaN so the
 * design skips those rows. Throws std::invalid_argument if no row survives.
 */
[[nodiscard]] TimeSeriesDataset loglog_transform(const TimeSeriesDataset& ds,
                                                 const std::string& price = "P",
                                                 const std::string& demand = "D");

}  // namespace civ::estimation
