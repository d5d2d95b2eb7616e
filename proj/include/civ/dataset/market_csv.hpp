#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "civ/timeseries.hpp"

namespace civ::dataset {

/// Base of every loader error; the subclasses tell the failure modes apart.
class MarketCsvError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class EmptyFileError : public MarketCsvError {
    using MarketCsvError::MarketCsvError;
};
class MissingColumnError : public MarketCsvError {
    using MarketCsvError::MarketCsvError;
};
class ParseError : public MarketCsvError {
    using MarketCsvError::MarketCsvError;
};
class DuplicateTimestampError : public MarketCsvError {
    using MarketCsvError::MarketCsvError;
};
class SpacingError : public MarketCsvError {
    using MarketCsvError::MarketCsvError;
};

/// Wall-clock hour of a timestamp in local market time.
struct CivilHour {
    int year = 1970;
    unsigned month = 1, day = 1, hour = 0;
    /// Hours since 1970-01-01 00:00 on a calendar without DST.
    [[nodiscard]] std::int64_t index() const;
    /// 0 = Monday ... 6 = Sunday.
    [[nodiscard]] unsigned weekday() const;
    /// "YYYY-MM-DD HH:00"
    [[nodiscard]] std::string str() const;
    [[nodiscard]] static CivilHour from_index(std::int64_t hours);
};

/// Parses "YYYY-MM-DD HH:MM[:SS]" or with a 'T' separator; minutes and seconds must be zero.
[[nodiscard]] CivilHour parse_timestamp(const std::string& text);

/**
 * Column mapping of the market CSV. Required header names map onto dataset
 * columns: load -> D, price -> P, wind -> W. Every other column is kept under
 * its own name; empty cells become NaN (allowed only outside the required
 * columns, e.g. daily inputs given once per day).
 */
struct MarketSchema {
    std::string timestamp = "timestamp";
    std::string load = "load";
    std::string price = "price";
    std::string wind = "wind";
    /// Optional covariates documented for the application pipeline.
    static const std::vector<std::string>& optional_columns();
};

struct LoadReport {
    std::size_t rows_read = 0;
    /// Rows dropped at daylight-saving transitions (repeated autumn hour).
    std::size_t dst_dropped = 0;
    /// Spring-forward hours absent from the input.
    std::size_t dst_missing = 0;
};

struct LoadOptions {
    /// "eu": tolerate the EU daylight-saving transitions (last Sunday of March
    /// and October, 02:00 local); "none": any duplicate or gap is an error.
    std::string dst_rule = "eu";
};

[[nodiscard]] TimeSeriesDataset load_market_csv(std::istream& in, const LoadOptions& opts = {},
                                                LoadReport* report = nullptr,
                                                const MarketSchema& schema = {});
[[nodiscard]] TimeSeriesDataset load_market_csv(const std::filesystem::path& path,
                                                const LoadOptions& opts = {},
                                                LoadReport* report = nullptr,
                                                const MarketSchema& schema = {});

/// Inverse of the loader: D, P, W written as load, price, wind; NaN as empty cell.
void write_market_csv(std::ostream& out, const TimeSeriesDataset& ds, const MarketSchema& schema = {});

/**
 * Plain numeric table with a header (e.g. simulator output "t,W,P,D").
 * A column named `t` becomes the hour index; all other columns are data.
 */
[[nodiscard]] TimeSeriesDataset load_series_csv(std::istream& in);
[[nodiscard]] TimeSeriesDataset load_series_csv(const std::filesystem::path& path);
/// Writes "t,<columns>" with t taken from the hour index.
void write_series_csv(std::ostream& out, const TimeSeriesDataset& ds);

/// Market CSV when the header has a timestamp column, series CSV otherwise.
[[nodiscard]] TimeSeriesDataset load_any_csv(const std::filesystem::path& path, LoadReport* report = nullptr);

}  // namespace civ::dataset
