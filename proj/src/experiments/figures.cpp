#include "civ/experiments/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace civ::experiments {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = 0.0, hi = 1.0;

    void include(double v) {
        if (!std::isfinite(v)) return;
        if (empty) {
            lo = hi = v;
            empty = false;
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (hi == lo) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
    bool empty = true;
};

// A rectangular plotting area with linear axes.
class Panel {
public:
    Panel(double x0, double y0, double w, double h, Range xr, Range yr)
        : x0_(x0), y0_(y0), w_(w), h_(h), xr_(xr), yr_(yr) {}

    double x(double v) const { return x0_ + (v - xr_.lo) / (xr_.hi - xr_.lo) * w_; }
    double y(double v) const { return y0_ + h_ - (v - yr_.lo) / (yr_.hi - yr_.lo) * h_; }

    void axes(std::ostringstream& s, const std::string& xlabel, const std::string& ylabel,
              const std::string& title) const {
        s << "<rect x=\"" << px(x0_) << "\" y=\"" << px(y0_) << "\" width=\"" << px(w_)
          << "\" height=\"" << px(h_) << "\" fill=\"none\" stroke=\"#444\"/>\n";
        for (int i = 0; i <= 4; ++i) {
            const double xv = xr_.lo + (xr_.hi - xr_.lo) * i / 4.0;
            const double yv = yr_.lo + (yr_.hi - yr_.lo) * i / 4.0;
            s << "<text x=\"" << px(x(xv)) << "\" y=\"" << px(y0_ + h_ + 14)
              << "\" font-size=\"10\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
            s << "<text x=\"" << px(x0_ - 4) << "\" y=\"" << px(y(yv) + 3)
              << "\" font-size=\"10\" text-anchor=\"end\">" << num(yv) << "</text>\n";
        }
        s << "<text x=\"" << px(x0_ + w_ / 2) << "\" y=\"" << px(y0_ + h_ + 30)
          << "\" font-size=\"11\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
        s << "<text x=\"" << px(x0_ - 42) << "\" y=\"" << px(y0_ + h_ / 2) << "\" font-size=\"11\" "
          << "text-anchor=\"middle\" transform=\"rotate(-90 " << px(x0_ - 42) << ' ' << px(y0_ + h_ / 2)
          << ")\">" << escape(ylabel) << "</text>\n";
        s << "<text x=\"" << px(x0_ + w_ / 2) << "\" y=\"" << px(y0_ - 8)
          << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(title) << "</text>\n";
    }

private:
    double x0_, y0_, w_, h_;
    Range xr_, yr_;
};

std::string open_svg(double w, double h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(w) + "\" height=\"" + px(h) +
           "\" viewBox=\"0 0 " + px(w) + ' ' + px(h) + "\" font-family=\"sans-serif\">\n"
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

// White -> orange -> dark red on a log-ish scale of the cell value.
std::string heat_colour(double v, double max) {
    if (!std::isfinite(v)) return "#cccccc";
    const double t = max > 0 ? std::clamp(std::log1p(std::max(v, 0.0)) / std::log1p(max), 0.0, 1.0) : 0.0;
    const int r = static_cast<int>(255 - 75 * t);
    const int g = static_cast<int>(255 - 235 * t);
    const int b = static_cast<int>(255 - 230 * t);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string heatmap(const Table& t) {
    const std::string xn = t.header[0], yn = t.header[1], vn = t.header[2];
    std::set<double> xs, ys;
    double max = 0.0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        xs.insert(t.number(r, xn));
        ys.insert(t.number(r, yn));
        const double v = t.number(r, vn);
        if (std::isfinite(v)) max = std::max(max, v);
    }
    const std::vector<double> xv(xs.begin(), xs.end()), yv(ys.begin(), ys.end());
    const double cell = 56.0, left = 80.0, top = 40.0;
    const double w = left + cell * static_cast<double>(yv.size()) + 20, h = top + cell * static_cast<double>(xv.size()) + 50;
    std::ostringstream s;
    s << open_svg(w, h);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto i = static_cast<double>(std::find(xv.begin(), xv.end(), t.number(r, xn)) - xv.begin());
        const auto j = static_cast<double>(std::find(yv.begin(), yv.end(), t.number(r, yn)) - yv.begin());
        const double v = t.number(r, vn);
        // Rows run top to bottom with increasing x so the origin sits top-left.
        s << "<rect class=\"cell\" x=\"" << px(left + j * cell) << "\" y=\"" << px(top + i * cell)
          << "\" width=\"" << px(cell) << "\" height=\"" << px(cell) << "\" fill=\"" << heat_colour(v, max)
          << "\" stroke=\"white\"/>\n";
        s << "<text x=\"" << px(left + (j + 0.5) * cell) << "\" y=\"" << px(top + (i + 0.5) * cell + 4)
          << "\" font-size=\"10\" text-anchor=\"middle\">" << num(v) << "</text>\n";
    }
    for (std::size_t i = 0; i < xv.size(); ++i) {
        s << "<text x=\"" << px(left - 6) << "\" y=\"" << px(top + (static_cast<double>(i) + 0.5) * cell + 4)
          << "\" font-size=\"10\" text-anchor=\"end\">" << num(xv[i]) << "</text>\n";
    }
    for (std::size_t j = 0; j < yv.size(); ++j) {
        s << "<text x=\"" << px(left + (static_cast<double>(j) + 0.5) * cell) << "\" y=\"" << px(top - 6)
          << "\" font-size=\"10\" text-anchor=\"middle\">" << num(yv[j]) << "</text>\n";
    }
    s << "<text x=\"" << px(left + cell * static_cast<double>(yv.size()) / 2) << "\" y=\"" << px(h - 12)
      << "\" font-size=\"11\" text-anchor=\"middle\">columns: " << escape(yn) << ", rows: " << escape(xn)
      << ", cells: " << escape(vn) << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

std::string scatter(const Table& t) {
    const std::string xn = "alpha_D1", yn = "pct_error", gn = "model";
    Range xr, yr;
    std::map<std::string, std::size_t> groups;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        xr.include(t.number(r, xn));
        yr.include(t.number(r, yn));
        groups.emplace(t.text(r, gn), groups.size());
    }
    xr.pad();
    yr.pad();
    const Panel p(70, 40, 480, 320, xr, yr);
    std::ostringstream s;
    s << open_svg(660, 420);
    p.axes(s, "observed lag-1 autocorrelation of D", "percentage error", "estimator error vs observed autocorrelation");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double x = t.number(r, xn), y = t.number(r, yn);
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        s << "<circle class=\"point\" cx=\"" << px(p.x(x)) << "\" cy=\"" << px(p.y(y)) << "\" r=\"3\" fill=\""
          << kPalette[groups[t.text(r, gn)] % 8] << "\" fill-opacity=\"0.7\"/>\n";
    }
    double ly = 50;
    for (const auto& [name, idx] : groups) {
        s << "<circle cx=\"570\" cy=\"" << px(ly) << "\" r=\"4\" fill=\"" << kPalette[idx % 8] << "\"/>"
          << "<text x=\"580\" y=\"" << px(ly + 4) << "\" font-size=\"11\">" << escape(name) << "</text>\n";
        ly += 16;
    }
    s << "</svg>\n";
    return s.str();
}

std::string error_bars(const Table& t) {
    const std::string group_col = std::find(t.header.begin(), t.header.end(), "model") != t.header.end()
                                      ? "model"
                                      : (std::find(t.header.begin(), t.header.end(), "split") != t.header.end()
                                             ? "split"
                                             : "");
    const bool has_replicate = std::find(t.header.begin(), t.header.end(), "replicate") != t.header.end();
    std::vector<std::string> groups;
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (has_replicate && t.number(r, "replicate") != 0) continue;  // figure shows one dataset
        const std::string g = group_col.empty() ? "" : t.text(r, group_col);
        if (!members.count(g)) groups.push_back(g);
        members[g].push_back(r);
    }
    const double pw = 260, ph = 300;
    std::ostringstream s;
    s << open_svg(70 + static_cast<double>(groups.size()) * (pw + 70), ph + 110);
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& rows = members[groups[gi]];
        Range yr, xr;
        xr.lo = 0;
        xr.hi = static_cast<double>(rows.size()) + 1;
        xr.empty = false;
        for (auto r : rows) {
            yr.include(t.number(r, "ci_lower"));
            yr.include(t.number(r, "ci_upper"));
            yr.include(t.number(r, "beta_hat"));
        }
        yr.pad();
        const Panel p(70 + static_cast<double>(gi) * (pw + 70), 40, pw, ph, xr, yr);
        s << "<g class=\"panel\">\n";
        p.axes(s, "estimator", "estimate", groups[gi]);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto r = rows[k];
            const double x = p.x(static_cast<double>(k) + 1);
            const double b = t.number(r, "beta_hat"), lo = t.number(r, "ci_lower"), hi = t.number(r, "ci_upper");
            if (std::isfinite(lo) && std::isfinite(hi)) {
                s << "<line x1=\"" << px(x) << "\" x2=\"" << px(x) << "\" y1=\"" << px(p.y(lo)) << "\" y2=\""
                  << px(p.y(hi)) << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
            }
            if (std::isfinite(b)) {
                s << "<circle class=\"estimate\" cx=\"" << px(x) << "\" cy=\"" << px(p.y(b))
                  << "\" r=\"3.5\" fill=\"#d62728\"/>\n";
            }
            s << "<text x=\"" << px(x) << "\" y=\"" << px(40 + ph + 44) << "\" font-size=\"10\" "
              << "text-anchor=\"middle\">" << escape(t.text(r, "estimator")) << "</text>\n";
        }
        s << "</g>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::string indicators(const Table& t) {
    const char* metrics[] = {"coverage", "avg_abs_pct_error", "mean_ci_length"};
    std::vector<std::string> estimators;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string e = t.text(r, "estimator");
        if (std::find(estimators.begin(), estimators.end(), e) == estimators.end()) estimators.push_back(e);
    }
    std::ostringstream s;
    const double pw = 240, ph = 220;
    s << open_svg(3 * (pw + 80) + 90, ph + 110);
    for (int m = 0; m < 3; ++m) {
        Range xr, yr;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            xr.include(t.number(r, "years"));
            yr.include(t.number(r, metrics[m]));
        }
        xr.pad();
        yr.pad();
        const Panel p(70 + m * (pw + 80), 40, pw, ph, xr, yr);
        s << "<g class=\"panel\">\n";
        p.axes(s, "years of hourly data", metrics[m], metrics[m]);
        for (std::size_t e = 0; e < estimators.size(); ++e) {
            std::string points;
            for (std::size_t r = 0; r < t.rows.size(); ++r) {
                if (t.text(r, "estimator") != estimators[e]) continue;
                const double v = t.number(r, metrics[m]);
                if (!std::isfinite(v)) continue;
                points += px(p.x(t.number(r, "years"))) + "," + px(p.y(v)) + " ";
            }
            s << "<polyline fill=\"none\" stroke=\"" << kPalette[e % 8] << "\" stroke-width=\"2\" points=\""
              << points << "\"/>\n";
        }
        s << "</g>\n";
    }
    for (std::size_t e = 0; e < estimators.size(); ++e) {
        const double y = 50 + 16 * static_cast<double>(e);
        s << "<line x1=\"" << px(3 * (pw + 80) + 10) << "\" x2=\"" << px(3 * (pw + 80) + 30) << "\" y1=\""
          << px(y) << "\" y2=\"" << px(y) << "\" stroke=\"" << kPalette[e % 8] << "\" stroke-width=\"2\"/>"
          << "<text x=\"" << px(3 * (pw + 80) + 34) << "\" y=\"" << px(y + 4) << "\" font-size=\"11\">"
          << escape(estimators[e]) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace

FigureStyle figure_style_for(const std::string& experiment) {
    if (experiment == "bias_heatmap") return FigureStyle::Heatmap;
    if (experiment == "observed_ar") return FigureStyle::Scatter;
    if (experiment == "indicators") return FigureStyle::Indicators;
    return FigureStyle::ErrorBars;
}

FigureAssets emit_figure_assets(const Table& table, FigureStyle style) {
    if (table.rows.empty()) throw std::invalid_argument("figure: table is empty");
    FigureAssets out;
    std::ostringstream csv;
    write_csv(csv, table);
    out.csv = csv.str();
    switch (style) {
        case FigureStyle::Heatmap: out.svg = heatmap(table); break;
        case FigureStyle::Scatter: out.svg = scatter(table); break;
        case FigureStyle::ErrorBars: out.svg = error_bars(table); break;
        case FigureStyle::Indicators: out.svg = indicators(table); break;
    }
    return out;
}

}  // namespace civ::experiments
