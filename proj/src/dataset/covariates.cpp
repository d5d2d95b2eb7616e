#include "civ/dataset/covariates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "civ/dataset/market_csv.hpp"

namespace civ::dataset {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

std::vector<CivilHour> civil_hours(const TimeSeriesDataset& ds) {
    if (ds.timestamps().size() != ds.rows()) {
        throw std::invalid_argument("covariates: dataset has no timestamps");
    }
    std::vector<CivilHour> out;
    out.reserve(ds.rows());
    for (const auto& t : ds.timestamps()) out.push_back(parse_timestamp(t));
    return out;
}

}  // namespace

CovariateOptions parse_covariate_options(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("covariate options must be a JSON object");
    CovariateOptions o;
    for (const auto& [key, v] : j.items()) {
        try {
            if (key == "hour_of_week") o.hour_of_week = v.get<bool>();
            else if (key == "month") o.month = v.get<bool>();
            else if (key == "year") o.year = v.get<bool>();
            else if (key == "drop_full_holidays") o.drop_full_holidays = v.get<bool>();
            else if (key == "continuous") o.continuous = v.get<std::vector<std::string>>();
            else if (key == "daily") o.daily = v.get<std::vector<std::string>>();
            else if (key == "date_from") o.date_from = v.get<std::string>();
            else if (key == "date_to") o.date_to = v.get<std::string>();
            else throw std::invalid_argument("unknown covariate option '" + key + "'");
        } catch (const json::exception& e) {
            throw std::invalid_argument("covariate option '" + key + "': " + e.what());
        }
    }
    return o;
}

json to_json(const CovariateOptions& o) {
    return {{"hour_of_week", o.hour_of_week}, {"month", o.month},
            {"year", o.year},                 {"drop_full_holidays", o.drop_full_holidays},
            {"continuous", o.continuous},     {"daily", o.daily},
            {"date_from", o.date_from},       {"date_to", o.date_to}};
}

CovariateSet build_covariates(const TimeSeriesDataset& ds, const CovariateOptions& opts) {
    const auto stamps = civil_hours(ds);
    const std::size_t n = ds.rows();

    std::vector<std::string> names = ds.names();
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        const auto c = ds.column(j);
        cols.emplace_back(c.begin(), c.end());
        if (contains(opts.daily, names[j])) {
            double last = kNaN;
            for (double& v : cols.back()) {
                if (std::isfinite(v)) last = v;
                else v = last;
            }
        }
    }

    CovariateSet out;
    std::vector<std::string> continuous = opts.continuous;
    if (continuous.empty()) {
        for (const auto& c : MarketSchema::optional_columns()) {
            if (ds.has(c)) continuous.push_back(c);
        }
    }
    for (const auto& c : continuous) {
        if (!ds.has(c)) throw std::invalid_argument("covariates: no column '" + c + "'");
        out.columns.push_back(c);
    }

    // Row filters: country-wide holidays and the optional date window.
    std::vector<bool> keep(n, true);
    if (opts.drop_full_holidays && ds.has("holiday_fraction")) {
        const auto& h = cols[*ds.index_of("holiday_fraction")];
        for (std::size_t i = 0; i < n; ++i) {
            if (h[i] >= 1.0) {
                keep[i] = false;
                ++out.holiday_rows_dropped;
            }
        }
    }
    auto day_index = [](const std::string& date) {
        return parse_timestamp(date + " 00:00").index();
    };
    const auto from = opts.date_from.empty() ? std::numeric_limits<std::int64_t>::min()
                                             : day_index(opts.date_from);
    const auto to = opts.date_to.empty() ? std::numeric_limits<std::int64_t>::max()
                                         : day_index(opts.date_to) + 23;
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = stamps[i].index();
        if (keep[i] && (idx < from || idx > to)) {
            keep[i] = false;
            ++out.date_rows_dropped;
        }
    }

    std::set<int> years;
    for (std::size_t i = 0; i < n; ++i) {
        if (keep[i]) years.insert(stamps[i].year);
    }
    auto add_group = [&](const std::string& prefix, int levels, int reference, auto level_of,
                         auto label_of) {
        std::vector<std::vector<double>> group(static_cast<std::size_t>(levels), std::vector<double>(n, 0.0));
        std::vector<bool> used(static_cast<std::size_t>(levels), false);
        for (std::size_t i = 0; i < n; ++i) {
            const int l = level_of(stamps[i]);
            group[static_cast<std::size_t>(l)][i] = 1.0;
            if (keep[i]) used[static_cast<std::size_t>(l)] = true;
        }
        for (int l = 0; l < levels; ++l) {
            if (l == reference || !used[static_cast<std::size_t>(l)]) continue;
            const std::string name = prefix + label_of(l);
            if (contains(names, name)) throw std::invalid_argument("covariates: column '" + name + "' exists");
            names.push_back(name);
            cols.push_back(std::move(group[static_cast<std::size_t>(l)]));
            out.columns.push_back(name);
        }
    };
    if (opts.hour_of_week) {
        add_group("how_", 168, 0, [](const CivilHour& h) { return static_cast<int>(h.weekday() * 24 + h.hour); },
                  [](int l) { return std::to_string(l); });
    }
    if (opts.month) {
        add_group("month_", 12, 0, [](const CivilHour& h) { return static_cast<int>(h.month) - 1; },
                  [](int l) { return std::to_string(l + 1); });
    }
    if (opts.year && !years.empty()) {
        const int first = *years.begin();
        const int span = *years.rbegin() - first + 1;
        add_group("year_", span, 0, [first](const CivilHour& h) {
            return std::clamp(h.year - first, 0, std::numeric_limits<int>::max());
        }, [first](int l) { return std::to_string(first + l); });
    }

    out.data = TimeSeriesDataset(std::move(names), std::move(cols), ds.hours(), ds.timestamps())
                   .select_rows(keep);
    return out;
}

TimeSeriesDataset materialize_lags(const TimeSeriesDataset& ds, const std::vector<std::string>& columns,
                                   int max_lag) {
    if (max_lag < 0) throw std::invalid_argument("lags: negative lag depth");
    if (static_cast<std::size_t>(max_lag) >= std::max<std::size_t>(ds.rows(), 1)) {
        throw std::invalid_argument("lags: lag depth " + std::to_string(max_lag) +
                                    " is not below the series length " + std::to_string(ds.rows()));
    }
    std::vector<std::string> names = ds.names();
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        const auto c = ds.column(j);
        cols.emplace_back(c.begin(), c.end());
    }
    for (const auto& c : columns) {
        if (!ds.has(c)) throw std::invalid_argument("lags: no column '" + c + "'");
        const auto base = ds.column(c);
        for (int k = 1; k <= max_lag; ++k) {
            const std::string name = lag_column_name(c, k);
            if (contains(names, name)) continue;
            std::vector<double> v(ds.rows(), kNaN);
            const auto& h = ds.hours();
            for (std::size_t i = 0; i < ds.rows(); ++i) {
                // Hours strictly increase, so hour h[i] - k sits at most k rows back.
                const auto lo = h.begin() + static_cast<std::ptrdiff_t>(i > static_cast<std::size_t>(k) ? i - k : 0);
                const auto it = std::lower_bound(lo, h.begin() + static_cast<std::ptrdiff_t>(i), h[i] - k);
                if (it != h.begin() + static_cast<std::ptrdiff_t>(i) && *it == h[i] - k) {
                    v[i] = base[static_cast<std::size_t>(it - h.begin())];
                }
            }
            names.push_back(name);
            cols.push_back(std::move(v));
        }
    }
    return TimeSeriesDataset(std::move(names), std::move(cols), ds.hours(), ds.timestamps());
}

SplitRule parse_split_rule(const std::string& s) {
    if (s == "all") return SplitRule::All;
    if (s == "onpeak") return SplitRule::OnPeak;
    if (s == "offpeak") return SplitRule::OffPeak;
    if (s == "both") return SplitRule::Both;
    throw std::invalid_argument("unknown split rule '" + s + "' (expected all, onpeak, offpeak, both)");
}

std::string split_name(SplitRule r) {
    switch (r) {
        case SplitRule::All: return "all";
        case SplitRule::OnPeak: return "onpeak";
        case SplitRule::OffPeak: return "offpeak";
        case SplitRule::Both: return "both";
    }
    return "all";
}

bool is_on_peak(const std::string& timestamp) {
    const auto h = parse_timestamp(timestamp).hour;
    return h >= 8 && h <= 19;
}

std::vector<TimeSeriesDataset> split(const TimeSeriesDataset& ds, SplitRule rule) {
    if (rule == SplitRule::All) return {ds};
    if (ds.timestamps().size() != ds.rows()) throw std::invalid_argument("split: dataset has no timestamps");
    std::vector<bool> on(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) on[i] = is_on_peak(ds.timestamps()[i]);
    std::vector<bool> off(on.size());
    std::transform(on.begin(), on.end(), off.begin(), [](bool b) { return !b; });
    switch (rule) {
        case SplitRule::OnPeak: return {ds.select_rows(on)};
        case SplitRule::OffPeak: return {ds.select_rows(off)};
        default: return {ds.select_rows(on), ds.select_rows(off)};
    }
}

std::vector<TimeSeriesDataset> lags_then_split(const TimeSeriesDataset& ds, const LagSpec& lags,
                                               SplitRule rule) {
    return split(materialize_lags(ds, lags.columns, lags.max_lag), rule);
}

}  // namespace civ::dataset
