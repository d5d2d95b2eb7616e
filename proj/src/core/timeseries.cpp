#include "civ/timeseries.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace civ {

TimeSeriesDataset::TimeSeriesDataset(std::vector<std::string> names,
                                     std::vector<std::vector<double>> columns,
                                     std::vector<std::int64_t> hours,
                                     std::vector<std::string> timestamps)
    : names_(std::move(names)),
      columns_(std::move(columns)),
      hours_(std::move(hours)),
      timestamps_(std::move(timestamps)) {
    if (names_.size() != columns_.size()) {
        throw std::invalid_argument("dataset: name count does not match column count");
    }
    std::size_t n = columns_.empty() ? hours_.size() : columns_.front().size();
    for (const auto& c : columns_) {
        if (c.size() != n) throw std::invalid_argument("dataset: columns differ in length");
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
        for (std::size_t j = i + 1; j < names_.size(); ++j) {
            if (names_[i] == names_[j]) {
                throw std::invalid_argument("dataset: duplicate column '" + names_[i] + "'");
            }
        }
    }
    if (hours_.empty()) {
        hours_.resize(n);
        std::iota(hours_.begin(), hours_.end(), std::int64_t{0});
    }
    if (hours_.size() != n) throw std::invalid_argument("dataset: hour index length mismatch");
    for (std::size_t i = 1; i < n; ++i) {
        if (hours_[i] <= hours_[i - 1]) {
            throw std::invalid_argument("dataset: hour index must be strictly increasing");
        }
    }
    if (!timestamps_.empty() && timestamps_.size() != n) {
        throw std::invalid_argument("dataset: timestamp count mismatch");
    }
}

bool TimeSeriesDataset::has(std::string_view name) const noexcept {
    return index_of(name).has_value();
}

std::optional<std::size_t> TimeSeriesDataset::index_of(std::string_view name) const noexcept {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

std::span<const double> TimeSeriesDataset::column(std::string_view name) const {
    auto j = index_of(name);
    if (!j) throw std::out_of_range("dataset: no column named '" + std::string(name) + "'");
    return columns_[*j];
}

bool TimeSeriesDataset::contiguous() const noexcept {
    for (std::size_t i = 1; i < hours_.size(); ++i) {
        if (hours_[i] != hours_[i - 1] + 1) return false;
    }
    return true;
}

std::optional<double> TimeSeriesDataset::lagged(std::string_view name, int lag,
                                                std::size_t row) const {
    if (lag < 0) throw std::invalid_argument("dataset: negative lag");
    if (lag > 0) {
        if (auto j = index_of(lag_column_name(name, lag))) return columns_[*j][row];
    }
    auto j = index_of(name);
    if (!j) return std::nullopt;
    // Hours strictly increase, so the lagged hour is at most `lag` rows back.
    const auto end = hours_.begin() + static_cast<std::ptrdiff_t>(row);
    const auto lo = row > static_cast<std::size_t>(lag) ? end - lag : hours_.begin();
    const auto it = std::lower_bound(lo, end, hours_[row] - lag);
    if (it == end || *it != hours_[row] - lag) return std::nullopt;
    return columns_[*j][static_cast<std::size_t>(it - hours_.begin())];
}

TimeSeriesDataset TimeSeriesDataset::with_column(std::string name,
                                                 std::vector<double> values) const {
    auto names = names_;
    auto cols = columns_;
    if (auto j = index_of(name)) {
        cols[*j] = std::move(values);
    } else {
        names.push_back(std::move(name));
        cols.push_back(std::move(values));
    }
    return TimeSeriesDataset(std::move(names), std::move(cols), hours_, timestamps_);
}

TimeSeriesDataset TimeSeriesDataset::select_rows(const std::vector<bool>& keep) const {
    if (keep.size() != rows()) throw std::invalid_argument("dataset: row mask length mismatch");
    std::vector<std::vector<double>> cols(columns_.size());
    std::vector<std::int64_t> hours;
    std::vector<std::string> stamps;
    for (std::size_t i = 0; i < rows(); ++i) {
        if (!keep[i]) continue;
        for (std::size_t j = 0; j < cols.size(); ++j) cols[j].push_back(columns_[j][i]);
        hours.push_back(hours_[i]);
        if (!timestamps_.empty()) stamps.push_back(timestamps_[i]);
    }
    if (hours.empty() && !cols.empty()) {
        // keep an explicit empty hour vector consistent with empty columns
        return TimeSeriesDataset(names_, std::move(cols), {}, {});
    }
    return TimeSeriesDataset(names_, std::move(cols), std::move(hours), std::move(stamps));
}

TimeSeriesDataset TimeSeriesDataset::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > rows()) throw std::out_of_range("dataset: bad slice");
    std::vector<bool> keep(rows(), false);
    std::fill(keep.begin() + static_cast<std::ptrdiff_t>(begin),
              keep.begin() + static_cast<std::ptrdiff_t>(end), true);
    return select_rows(keep);
}

std::string lag_column_name(std::string_view name, int lag) {
    if (lag == 0) return std::string(name);
    return std::string(name) + "[-" + std::to_string(lag) + "]";
}

}  // namespace civ
