#pragma once

#include <string>

#include "civ/experiments/table.hpp"

namespace civ::experiments {

enum class FigureStyle {
    Heatmap,     // columns: x, y, value (first three)
    Scatter,     // alpha_D1 vs pct_error, one colour per model
    ErrorBars,   // estimator, beta_hat, ci_lower, ci_upper; one panel per model
    Indicators,  // coverage / error / CI length against years, one line per estimator
};

/// Style used for each experiment's figure; ErrorBars for anything unknown.
[[nodiscard]] FigureStyle figure_style_for(const std::string& experiment);

struct FigureAssets {
    std::string csv;
    std::string svg;
};

/// Deterministic CSV plus a self-contained SVG. Throws std::invalid_argument on an empty table.
[[nodiscard]] FigureAssets emit_figure_assets(const Table& table, FigureStyle style);

}  // namespace civ::experiments
