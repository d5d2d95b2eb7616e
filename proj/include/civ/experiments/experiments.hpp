#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "civ/experiments/table.hpp"
#include "civ/graph/builtin.hpp"
#include "civ/scm/model.hpp"
#include "json.hpp"

namespace civ::experiments {

using graph::ModelKind;

enum class ExperimentId { ValidityPanel, BiasHeatmap, ObservedAr, Indicators };

[[nodiscard]] std::string experiment_name(ExperimentId id);
/// Accepts "validity_panel", "bias_heatmap", "observed_ar", "indicators".
[[nodiscard]] ExperimentId parse_experiment(const std::string& name);

/**
 * Everything an experiment run depends on. Replicate r of any cell is
 * simulated with seed seed_base + r.
 */
struct ExperimentConfig {
    ExperimentId id = ExperimentId::ValidityPanel;
    std::string preset = "desk";
    std::vector<ModelKind> models;
    /// Heatmap axes: wind AR(1) coefficient and the model's own memory coefficient.
    std::vector<double> wind_grid;
    std::vector<double> memory_grid;
    /// Observed-autocorrelation draws per model, and the coefficient ranges they span.
    int draws = 0;
    std::map<std::string, std::pair<double, double>> coefficient_ranges;
    std::vector<double> sizes_years;
    int replicates = 1;
    int T = 10'000;
    int lag_depth = 5;
    std::vector<std::string> estimators;
    std::uint64_t seed_base = 1000;
    /// Overrides applied on top of the model defaults (keys of ModelParams::set).
    std::map<std::string, std::string> params;
    unsigned threads = 0;

    void validate() const;
};

/// Named presets: "desk" (CI scale) or "paper" (full scale, long runs).
[[nodiscard]] ExperimentConfig preset(ExperimentId id, const std::string& name);

void to_json(nlohmann::json& j, const ExperimentConfig& c);
/// Merges keys of `j` into `c`; unknown keys throw std::invalid_argument.
void merge_json(ExperimentConfig& c, const nlohmann::json& j);

struct ExperimentOutput {
    std::string name;
    Table table;
    /// Secondary table (e.g. per-estimator summaries); may be empty.
    Table summary;
    nlohmann::json meta;
};

/// Hours per year of hourly data.
inline constexpr int kHoursPerYear = 8'760;

/// Model parameters used by every experiment: model defaults, overrides, intercept re-solved.
[[nodiscard]] scm::ModelParams experiment_params(ModelKind kind,
                                                 const std::map<std::string, std::string>& overrides);

/**
 * Copy of `p` with AR(1) wind coefficient `beta_w`, with the innovation scale
 * adjusted so the stationary wind variance stays at the default's.
 */
[[nodiscard]] scm::ModelParams with_wind_memory(scm::ModelParams p, double beta_w);

/// Burn-in long enough for the slowest root: max(2000, 20 / (1 - rho)).
[[nodiscard]] int burn_in_for(ModelKind kind, const scm::ModelParams& p);

[[nodiscard]] ExperimentOutput run_validity_panel(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentOutput run_bias_heatmap(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentOutput run_observed_ar(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentOutput run_indicators(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Writes <name>.csv, <name>.svg, <name>.meta.json (and <name>.summary.csv if present).
std::vector<std::filesystem::path> write_outputs(const ExperimentOutput& out,
                                                 const std::filesystem::path& dir);

}  // namespace civ::experiments
