#include "civ/estimation/transforms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace civ::estimation {

namespace {

bool is_series_column(const std::string& column, const std::string& base) {
    if (column == base) return true;
    return column.size() > base.size() + 3 && column.compare(0, base.size(), base) == 0 &&
           column.compare(base.size(), 2, "[-") == 0 && column.back() == ']';
}

}  // namespace

TimeSeriesDataset loglog_transform(const TimeSeriesDataset& ds, const std::string& price,
                                   const std::string& demand) {
    if (!ds.has(price) || !ds.has(demand)) {
        throw std::invalid_argument("loglog: dataset needs columns '" + price + "' and '" + demand + "'");
    }
    const auto p = ds.column(price);
    const auto d = ds.column(demand);
    std::vector<bool> keep(ds.rows());
    std::size_t kept = 0;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        keep[i] = p[i] > 0.0 && d[i] > 0.0;
        kept += keep[i] ? 1 : 0;
    }
    if (kept == 0) throw std::invalid_argument("loglog: no row has positive price and demand");

    std::vector<std::vector<double>> columns;
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        const auto src = ds.column(j);
        std::vector<double> values(src.begin(), src.end());
        const auto& name = ds.names()[j];
        if (is_series_column(name, price) || is_series_column(name, demand)) {
            for (double& v : values) {
                v = v > 0.0 ? std::log(v) : std::numeric_limits<double>::quiet_NaN();
            }
        }
        columns.push_back(std::move(values));
    }
    return TimeSeriesDataset(ds.names(), std::move(columns), ds.hours(), ds.timestamps())
        .select_rows(keep);
}

}  // namespace civ::estimation
