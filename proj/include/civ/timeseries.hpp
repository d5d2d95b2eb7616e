#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace civ {

/**
 * Aligned, column-oriented table of hourly series.
 *
 * Every row carries an integer hour index (strictly increasing). Rows are
 * usually contiguous (index t, t+1, ...); filtered datasets may contain gaps,
 * in which case a lag is only resolvable through a materialized lag column
 * (see `lag_column_name`) or when the lagged hour is itself present.
 */
class TimeSeriesDataset {
public:
    TimeSeriesDataset() = default;

    /// Columns must share one length. Hours default to 0..T-1.
    TimeSeriesDataset(std::vector<std::string> names, std::vector<std::vector<double>> columns,
                      std::vector<std::int64_t> hours = {},
                      std::vector<std::string> timestamps = {});

    [[nodiscard]] std::size_t rows() const noexcept { return hours_.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return names_.size(); }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] const std::vector<std::int64_t>& hours() const noexcept { return hours_; }
    [[nodiscard]] const std::vector<std::string>& timestamps() const noexcept { return timestamps_; }

    [[nodiscard]] bool has(std::string_view name) const noexcept;
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const noexcept;

    /// Throws std::out_of_range for an unknown column.
    [[nodiscard]] std::span<const double> column(std::string_view name) const;
    [[nodiscard]] std::span<const double> column(std::size_t j) const { return columns_.at(j); }

    /// True when hours increase by exactly one between consecutive rows.
    [[nodiscard]] bool contiguous() const noexcept;

    /**
     * Value of `name` at `lag` hours before row `row`, if it can be resolved:
     * a materialized column `name[-lag]` wins; otherwise some earlier row must
     * carry hour index hours[row] - lag.
     */
    [[nodiscard]] std::optional<double> lagged(std::string_view name, int lag, std::size_t row) const;

    [[nodiscard]] TimeSeriesDataset with_column(std::string name, std::vector<double> values) const;
    [[nodiscard]] TimeSeriesDataset select_rows(const std::vector<bool>& keep) const;
    [[nodiscard]] TimeSeriesDataset slice(std::size_t begin, std::size_t end) const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
    std::vector<std::int64_t> hours_;
    std::vector<std::string> timestamps_;
};

/// "W[-3]" for lag 3, "W" for lag 0.
[[nodiscard]] std::string lag_column_name(std::string_view name, int lag);

}  // namespace civ
