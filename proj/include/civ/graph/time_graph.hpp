#pragma once

#include <compare>
#include <set>
#include <string>
#include <vector>

namespace civ::graph {

struct Component {
    std::string name;
    bool observed = true;

    friend bool operator==(const Component&, const Component&) = default;
};

enum class EdgeKind { Directed, Bidirected };

/// Stationary edge template: (source, t - lag) -> (target, t), or <-> for Bidirected.
struct RolledEdge {
    EdgeKind kind = EdgeKind::Directed;
    int source = 0;
    int lag = 0;
    int target = 0;

    friend auto operator<=>(const RolledEdge&, const RolledEdge&) = default;
};

/// Vertex (time, component index). Orders by time first, then component.
struct Node {
    int time = 0;
    int component = 0;

    friend auto operator<=>(const Node&, const Node&) = default;
};

using NodeSet = std::set<Node>;

class RolledTimeGraph {
public:
    RolledTimeGraph(std::vector<Component> components, std::vector<RolledEdge> edges,
                    std::string name = {});

    [[nodiscard]] const std::vector<Component>& components() const noexcept { return components_; }
    [[nodiscard]] const std::vector<RolledEdge>& edges() const noexcept { return edges_; }
    [[nodiscard]] int max_lag() const noexcept { return max_lag_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

    /// Throws std::invalid_argument for unknown names.
    [[nodiscard]] int component_index(const std::string& name) const;
    [[nodiscard]] bool has_edge(const RolledEdge& e) const;

    [[nodiscard]] RolledTimeGraph without_edge(const RolledEdge& e, std::string name = {}) const;

private:
    std::vector<Component> components_;
    std::vector<RolledEdge> edges_;
    int max_lag_ = 0;
    std::string name_;
};

/**
 * Finite mixed graph over (time, component) nodes.
 *
 * Holds directed and bidirected adjacency. The directed part is verified
 * acyclic at construction; the value is immutable afterwards.
 */
class UnrolledGraph {
public:
    struct Edge {
        Node from;
        Node to;
        friend auto operator<=>(const Edge&, const Edge&) = default;
    };

    UnrolledGraph(std::vector<Component> components, std::vector<Node> nodes,
                  std::vector<Edge> directed, std::vector<Edge> bidirected, int t_min, int t_max);

    [[nodiscard]] const std::vector<Component>& components() const noexcept { return components_; }
    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] int t_min() const noexcept { return t_min_; }
    [[nodiscard]] int t_max() const noexcept { return t_max_; }

    [[nodiscard]] bool contains(const Node& n) const;
    /// Dense index of a node; throws std::out_of_range if absent.
    [[nodiscard]] int index(const Node& n) const;
    [[nodiscard]] const Node& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }

    [[nodiscard]] const std::vector<int>& children(int i) const { return children_[i]; }
    [[nodiscard]] const std::vector<int>& parents(int i) const { return parents_[i]; }
    [[nodiscard]] const std::vector<int>& siblings(int i) const { return siblings_[i]; }

    [[nodiscard]] bool has_directed(const Node& a, const Node& b) const;
    [[nodiscard]] bool has_bidirected(const Node& a, const Node& b) const;

    /// Sorted, de-duplicated edge lists (bidirected normalized so from < to).
    [[nodiscard]] std::vector<Edge> directed_edges() const;
    [[nodiscard]] std::vector<Edge> bidirected_edges() const;

    [[nodiscard]] std::string label(const Node& n) const;

    friend bool operator==(const UnrolledGraph& a, const UnrolledGraph& b);

private:
    std::vector<Component> components_;
    std::vector<Node> nodes_;
    std::vector<std::vector<int>> children_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> siblings_;
    int t_min_ = 0;
    int t_max_ = 0;
};

/// Instantiates every rolled edge whose endpoints fall in [0, window_length).
[[nodiscard]] UnrolledGraph unroll(const RolledTimeGraph& g, int window_length);

/// Same, over an explicit window [t_min, t_max].
[[nodiscard]] UnrolledGraph unroll(const RolledTimeGraph& g, int t_min, int t_max);

/// Latent projection onto `keep`.
[[nodiscard]] UnrolledGraph marginalize(const UnrolledGraph& g, const NodeSet& keep);

/// Projection onto all nodes of observed components.
[[nodiscard]] UnrolledGraph marginalize_latents(const UnrolledGraph& g);

/// Proper descendants of `s` (nodes of `s` are only included if reachable from another).
[[nodiscard]] NodeSet descendants(const UnrolledGraph& g, const NodeSet& s);

/// Ancestors of `s`, including `s` itself.
[[nodiscard]] NodeSet ancestors_closed(const UnrolledGraph& g, const NodeSet& s);

/// Drops directed edges x -> y for x in `x`; bidirected edges stay.
[[nodiscard]] UnrolledGraph remove_direct_edges(const UnrolledGraph& g, const NodeSet& x,
                                                const Node& y);

}  // namespace civ::graph
