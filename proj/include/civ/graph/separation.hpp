#pragma once

#include <string>
#include <vector>

#include "civ/graph/time_graph.hpp"

namespace civ::graph {

/// One step of a path: the node reached and the edge used to reach it.
struct PathStep {
    Node node;
    // Edge between the previous node and this one, as seen walking forward:
    // Forward "->", Backward "<-", Bidirected "<->". Unused for the first step.
    enum class Via { Start, Forward, Backward, Bidirected } via = Via::Start;

    friend bool operator==(const PathStep&, const PathStep&) = default;
};

using Path = std::vector<PathStep>;

struct SeparationResult {
    bool separated = true;
    /// Shortest unblocked path (lexicographic tie-break) when not separated.
    Path witness;
};

/**
 * Decides A ⟂ B | S with the collider rule extended to bidirected edges:
 * a node is a collider when both adjacent edges carry an arrowhead at it.
 * A collider passes when it or one of its descendants is in S; any other
 * node passes when it is not in S.
 *
 * Throws std::invalid_argument when the sets overlap or name unknown nodes.
 */
[[nodiscard]] SeparationResult d_separated(const UnrolledGraph& g, const NodeSet& a,
                                           const NodeSet& b, const NodeSet& s,
                                           bool want_witness = true);

/// "W@0 <- W@-1 -> P@-1", with times shifted by `time_offset`.
[[nodiscard]] std::string render_path(const UnrolledGraph& g, const Path& p, int time_offset = 0);

}  // namespace civ::graph
