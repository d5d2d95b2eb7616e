#pragma once

#include "civ/estimation/civ.hpp"
#include "civ/estimation/overlap.hpp"
#include "json.hpp"

namespace civ::estimation {

/// beta_hat, se, ci, first_stage, civ3 diagnostics, n_used, bandwidth.
[[nodiscard]] nlohmann::json to_json(const EstimateResult& r);
/// Labels, pairwise overlap matrix and the per-model rejection verdicts.
[[nodiscard]] nlohmann::json to_json(const OverlapReport& r);

}  // namespace civ::estimation
