#pragma once

#include <iosfwd>
#include <string>

#include "civ/graph/time_graph.hpp"

namespace civ::graph {

/**
 * Line-oriented rolled graph format:
 *
 *     # Model I
 *     observed: W P D
 *     latent: U
 *     W[-1] -> W
 *     P <-> D
 *
 * Only the source of an edge may carry a lag. Without header lines every
 * component is observed and declared by first use; once a header is given,
 * using an undeclared component is an error.
 */
[[nodiscard]] RolledTimeGraph parse_rolled_graph(std::istream& in, std::string name = {});
[[nodiscard]] RolledTimeGraph parse_rolled_graph(const std::string& text, std::string name = {});
[[nodiscard]] RolledTimeGraph load_rolled_graph(const std::string& path);

[[nodiscard]] std::string format_rolled_graph(const RolledTimeGraph& g);

}  // namespace civ::graph
