#include "civ/dataset/market_csv.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <algorithm>
#include <sstream>

namespace civ::dataset {

namespace {

using namespace std::chrono;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
    }
    return out;
}

sys_days last_sunday(int year, unsigned month) {
    return sys_days{year_month_weekday_last{std::chrono::year{year}, std::chrono::month{month},
                                            weekday_last{Sunday}}};
}

bool is_spring_gap(const CivilHour& h) {
    const auto d = sys_days{std::chrono::year{h.year} / h.month / h.day};
    return h.month == 3 && d == last_sunday(h.year, 3) && h.hour == 2;
}

bool is_autumn_repeat(const CivilHour& h) {
    const auto d = sys_days{std::chrono::year{h.year} / h.month / h.day};
    return h.month == 10 && d == last_sunday(h.year, 10) && h.hour == 2;
}

double parse_number(const std::string& text, std::size_t line, const std::string& column) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (text.empty() || end != begin + text.size() || !std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line) + ", column '" + column +
                         "': cannot parse '" + text + "' as a number");
    }
    return v;
}

}  // namespace

std::int64_t CivilHour::index() const {
    const auto d = sys_days{std::chrono::year{year} / month / day};
    return static_cast<std::int64_t>(d.time_since_epoch().count()) * 24 + hour;
}

unsigned CivilHour::weekday() const {
    const std::chrono::weekday w{sys_days{std::chrono::year{year} / month / day}};
    return w.iso_encoding() - 1;
}

std::string CivilHour::str() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02u:00", year, month, day, hour);
    return buf;
}

CivilHour CivilHour::from_index(std::int64_t hours) {
    std::int64_t days = hours >= 0 ? hours / 24 : -((-hours + 23) / 24);
    const auto hour = static_cast<unsigned>(hours - days * 24);
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
            static_cast<unsigned>(ymd.day()), hour};
}

CivilHour parse_timestamp(const std::string& text) {
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char sep = 0;
    int consumed = 0;
    const int n = std::sscanf(text.c_str(), "%4d-%2u-%2u%c%2u:%2u%n", &y, &mo, &d, &sep, &h, &mi, &consumed);
    if (n < 6 || (sep != ' ' && sep != 'T')) throw ParseError("cannot parse timestamp '" + text + "'");
    std::string rest = text.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && rest[0] == ':') {
        int more = 0;
        if (std::sscanf(rest.c_str(), ":%2u%n", &s, &more) != 1) {
            throw ParseError("cannot parse timestamp '" + text + "'");
        }
        rest = rest.substr(static_cast<std::size_t>(more));
    }
    if (!rest.empty()) throw ParseError("unexpected trailing text in timestamp '" + text + "'");
    const year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
    if (!ymd.ok() || h > 23) throw ParseError("invalid date or hour in timestamp '" + text + "'");
    if (mi != 0 || s != 0) throw SpacingError("timestamp '" + text + "' is not on the hour");
    return {y, mo, d, h};
}

const std::vector<std::string>& MarketSchema::optional_columns() {
    static const std::vector<std::string> cols{
        "solar",           "gas",           "coal",
        "eua",             "heating_degrees", "cooling_degrees",
        "holiday_fraction", "school_holiday_fraction", "sunlight"};
    return cols;
}

TimeSeriesDataset load_market_csv(std::istream& in, const LoadOptions& opts, LoadReport* report,
                                  const MarketSchema& schema) {
    if (opts.dst_rule != "eu" && opts.dst_rule != "none") {
        throw std::invalid_argument("unknown dst rule '" + opts.dst_rule + "' (expected eu or none)");
    }
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos) return true;
        }
        return false;
    };
    if (!next_line()) throw EmptyFileError("market CSV is empty");
    const auto header = split_csv_line(line);

    std::map<std::string, std::size_t> pos;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (pos.count(header[j])) throw ParseError("duplicate header column '" + header[j] + "'");
        pos[header[j]] = j;
    }
    std::string missing;
    for (const auto& req : {schema.timestamp, schema.load, schema.price, schema.wind}) {
        if (!pos.count(req)) missing += (missing.empty() ? "" : ", ") + req;
    }
    if (!missing.empty()) throw MissingColumnError("market CSV lacks required column(s): " + missing);

    // Output columns: D, P, W, then the remaining header columns in file order.
    std::vector<std::string> names{"D", "P", "W"};
    std::vector<std::size_t> source{pos[schema.load], pos[schema.price], pos[schema.wind]};
    std::vector<bool> required{true, true, true};
    for (std::size_t j = 0; j < header.size(); ++j) {
        const auto& h = header[j];
        if (h == schema.timestamp || h == schema.load || h == schema.price || h == schema.wind) continue;
        if (h == "D" || h == "P" || h == "W") {
            throw ParseError("column name '" + h + "' is reserved for load/price/wind");
        }
        names.push_back(h);
        source.push_back(j);
        required.push_back(false);
    }

    std::vector<CivilHour> stamps;
    std::vector<std::vector<double>> cols(names.size());
    while (next_line()) {
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, found " +
                             std::to_string(fields.size()));
        }
        CivilHour h;
        try {
            h = parse_timestamp(fields[pos[schema.timestamp]]);
        } catch (const MarketCsvError& e) {
            // keep the error class, add the location
            if (dynamic_cast<const SpacingError*>(&e)) {
                throw SpacingError("line " + std::to_string(line_no) + ": " + e.what());
            }
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        stamps.push_back(h);
        for (std::size_t c = 0; c < names.size(); ++c) {
            const std::string& f = fields[source[c]];
            if (f.empty() && !required[c]) {
                cols[c].push_back(std::numeric_limits<double>::quiet_NaN());
            } else {
                cols[c].push_back(parse_number(f, line_no, header[source[c]]));
            }
        }
    }
    if (stamps.empty()) throw EmptyFileError("market CSV has a header but no data rows");

    LoadReport rep;
    rep.rows_read = stamps.size();
    const bool eu = opts.dst_rule == "eu";
    std::vector<bool> keep(stamps.size(), true);
    for (std::size_t i = 1; i < stamps.size(); ++i) {
        const auto prev = stamps[i - 1].index(), cur = stamps[i].index();
        if (cur == prev) {
            if (eu && is_autumn_repeat(stamps[i])) {
                keep[i - 1] = keep[i] = false;
                continue;
            }
            throw DuplicateTimestampError("duplicate timestamp " + stamps[i].str());
        }
        if (cur < prev) {
            throw SpacingError("timestamps not increasing at " + stamps[i].str());
        }
        if (cur - prev == 1) continue;
        if (cur - prev == 2 && eu && is_spring_gap(CivilHour::from_index(prev + 1))) {
            ++rep.dst_missing;
            continue;
        }
        throw SpacingError("non-hourly spacing between " + stamps[i - 1].str() + " and " + stamps[i].str());
    }

    std::vector<std::int64_t> hours;
    std::vector<std::string> text;
    std::vector<std::vector<double>> kept(names.size());
    for (std::size_t i = 0; i < stamps.size(); ++i) {
        if (!keep[i]) {
            ++rep.dst_dropped;
            continue;
        }
        hours.push_back(stamps[i].index());
        text.push_back(stamps[i].str());
        for (std::size_t c = 0; c < names.size(); ++c) kept[c].push_back(cols[c][i]);
    }
    if (report) *report = rep;
    return TimeSeriesDataset(std::move(names), std::move(kept), std::move(hours), std::move(text));
}

TimeSeriesDataset load_market_csv(const std::filesystem::path& path, const LoadOptions& opts,
                                  LoadReport* report, const MarketSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return load_market_csv(in, opts, report, schema);
}

void write_market_csv(std::ostream& out, const TimeSeriesDataset& ds, const MarketSchema& schema) {
    if (ds.timestamps().size() != ds.rows()) {
        throw std::invalid_argument("write_market_csv: dataset has no timestamps");
    }
    auto header_of = [&](const std::string& n) {
        if (n == "D") return schema.load;
        if (n == "P") return schema.price;
        if (n == "W") return schema.wind;
        return n;
    };
    out << schema.timestamp;
    for (const auto& n : ds.names()) out << ',' << header_of(n);
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        out << ds.timestamps()[i];
        for (std::size_t j = 0; j < ds.cols(); ++j) {
            const double v = ds.column(j)[i];
            out << ',';
            if (std::isfinite(v)) {
                std::snprintf(buf, sizeof buf, "%.10g", v);
                out << buf;
            }
        }
        out << '\n';
    }
}

TimeSeriesDataset load_series_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos) return true;
        }
        return false;
    };
    if (!next_line()) throw EmptyFileError("CSV is empty");
    const auto header = split_csv_line(line);
    std::vector<std::string> names;
    std::optional<std::size_t> t_col;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == "t") t_col = j;
        else names.push_back(header[j]);
    }
    std::vector<std::vector<double>> cols(names.size());
    std::vector<std::int64_t> hours;
    while (next_line()) {
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
        }
        std::size_t c = 0;
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const double v = parse_number(fields[j], line_no, header[j]);
            if (t_col && j == *t_col) {
                if (v != std::floor(v)) throw ParseError("line " + std::to_string(line_no) + ": t must be an integer");
                hours.push_back(static_cast<std::int64_t>(v));
            } else {
                cols[c++].push_back(v);
            }
        }
    }
    if ((names.empty() ? hours.size() : cols.front().size()) == 0) throw EmptyFileError("CSV has no data rows");
    for (std::size_t i = 1; i < hours.size(); ++i) {
        if (hours[i] == hours[i - 1]) throw DuplicateTimestampError("duplicate t = " + std::to_string(hours[i]));
        if (hours[i] < hours[i - 1]) throw SpacingError("t not increasing at " + std::to_string(hours[i]));
    }
    return TimeSeriesDataset(std::move(names), std::move(cols), std::move(hours));
}

TimeSeriesDataset load_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return load_series_csv(in);
}

void write_series_csv(std::ostream& out, const TimeSeriesDataset& ds) {
    out << 't';
    for (const auto& n : ds.names()) out << ',' << n;
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        out << ds.hours()[i];
        for (std::size_t j = 0; j < ds.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", ds.column(j)[i]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

TimeSeriesDataset load_any_csv(const std::filesystem::path& path, LoadReport* report) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string first;
    std::getline(in, first);
    in.clear();
    in.seekg(0);
    const auto header = split_csv_line(first);
    if (std::find(header.begin(), header.end(), MarketSchema{}.timestamp) != header.end()) {
        return load_market_csv(in, {}, report);
    }
    return load_series_csv(in);
}

}  // namespace civ::dataset
