#pragma once

#include <string>
#include <vector>

#include "civ/graph/time_graph.hpp"

namespace civ::graph {

enum class ModelKind {
    InertialDemand,       // Model I
    HeterogeneousDemand,  // Model II
    DemandShifting,       // Model III
    IidInstrument,        // Model I without W[-1] -> W
    NoDemandMemory,       // Model I with β^{D1} = 0
    NoPriceResponse,      // Model I with β^P = 0
};

/// Canonical short name ("model1", ..., "iid_instrument").
[[nodiscard]] std::string model_name(ModelKind kind);
/// Accepts "model1", "I", "1", "modelI" and the special-case names.
[[nodiscard]] ModelKind parse_model_kind(const std::string& text);

[[nodiscard]] RolledTimeGraph builtin_graph(ModelKind kind);
[[nodiscard]] std::vector<ModelKind> builtin_kinds();

}  // namespace civ::graph
