#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "civ/estimator_spec.hpp"
#include "civ/graph/separation.hpp"
#include "civ/graph/time_graph.hpp"

namespace civ::graph {

/**
 * How an infinite stationary graph is cut down to a finite window.
 *
 * With `length == 0` the window is 3 * (query span + graph max lag) + 3 with
 * the query centred in it. When `recheck` is set, the decision is repeated
 * on a window max_lag + 1 longer and must agree.
 */
struct WindowPolicy {
    int length = 0;
    bool recheck = true;
};

/// Nodes are reported relative to the query's time 0 (the target hour t).
struct CivVerdict {
    bool civ1 = false;
    bool civ2 = false;
    std::vector<std::string> witness_path;  // node labels, e.g. "W@-1"
    std::string witness_rendered;           // "W@0 <- W@-1 -> ..."
    std::optional<std::string> witness_descendant;
    int window = 0;

    [[nodiscard]] bool valid() const noexcept { return civ1 && civ2; }
};

[[nodiscard]] CivVerdict check_civ_graphical(const RolledTimeGraph& g, const EstimatorSpec& spec,
                                             const WindowPolicy& policy = {});

/// A d-separation query whose nodes are (component, time offset) pairs.
struct RelativeQuery {
    std::vector<std::pair<std::string, int>> a, b, given;
};

struct RelativeSeparation {
    bool separated = true;
    std::vector<std::string> witness_path;
    std::string witness_rendered;
    int window = 0;
};

/// d-separation on the latent projection of a centred window.
[[nodiscard]] RelativeSeparation d_separated_relative(const RolledTimeGraph& g,
                                                      const RelativeQuery& q,
                                                      const WindowPolicy& policy = {});

}  // namespace civ::graph
