#pragma once

#include <cstdint>

#include "civ/scm/model.hpp"
#include "civ/timeseries.hpp"

namespace civ::scm {

struct SimulationConfig {
    int T = 43'800;
    int burn_in = 2'000;
    std::uint64_t seed = 0;
    /// Also return A and B (Model II) as columns of `data`.
    bool keep_latent = false;
};

/// Observed columns W, P, D (plus A, B on request) and the drawn shocks
/// U_W, U_S, U_D (and U_A, U_B for Model II).
struct Simulation {
    TimeSeriesDataset data;
    TimeSeriesDataset shocks;
};

/**
 * Runs the structural recursion for burn_in + T steps and keeps the last T.
 * Lags start at the stationary means. Per step the draws are taken in the
 * order U_W, U_S, U_D (Model II: U_W, U_S, U_A, U_B) from one mt19937_64
 * seeded with cfg.seed, so equal seeds give equal datasets.
 */
[[nodiscard]] Simulation simulate(const SimulatorSpec& spec, const SimulationConfig& cfg);

}  // namespace civ::scm
