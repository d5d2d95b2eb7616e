#include "civ/graph/time_graph.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>

namespace civ::graph {

namespace {

template <typename T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

RolledTimeGraph::RolledTimeGraph(std::vector<Component> components, std::vector<RolledEdge> edges,
                                 std::string name)
    : components_(std::move(components)), edges_(std::move(edges)), name_(std::move(name)) {
    if (components_.empty()) throw std::invalid_argument("graph: no components");
    bool any_observed = false;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        any_observed |= components_[i].observed;
        if (components_[i].name.empty()) throw std::invalid_argument("graph: empty component name");
        for (std::size_t j = i + 1; j < components_.size(); ++j) {
            if (components_[i].name == components_[j].name) {
                throw std::invalid_argument("graph: duplicate component '" + components_[i].name +
                                            "'");
            }
        }
    }
    if (!any_observed) throw std::invalid_argument("graph: no observed component");
    const int d = static_cast<int>(components_.size());
    for (auto& e : edges_) {
        if (e.source < 0 || e.source >= d || e.target < 0 || e.target >= d) {
            throw std::invalid_argument("graph: edge references unknown component");
        }
        if (e.lag < 0) throw std::invalid_argument("graph: negative edge lag");
        if (e.lag == 0 && e.source == e.target) {
            throw std::invalid_argument("graph: self loop on '" + components_[e.source].name + "'");
        }
        if (e.kind == EdgeKind::Bidirected && e.lag == 0 && e.source > e.target) {
            std::swap(e.source, e.target);
        }
        max_lag_ = std::max(max_lag_, e.lag);
    }
    sort_unique(edges_);

    // Instantaneous directed edges must form a DAG over components.
    std::vector<std::vector<int>> inst(components_.size());
    std::vector<int> indeg(components_.size(), 0);
    for (const auto& e : edges_) {
        if (e.kind == EdgeKind::Directed && e.lag == 0) {
            inst[e.source].push_back(e.target);
            ++indeg[e.target];
        }
    }
    std::deque<int> queue;
    for (int i = 0; i < d; ++i) {
        if (indeg[i] == 0) queue.push_back(i);
    }
    int seen = 0;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        ++seen;
        for (int v : inst[u]) {
            if (--indeg[v] == 0) queue.push_back(v);
        }
    }
    if (seen != d) throw std::invalid_argument("graph: instantaneous directed cycle");
}

int RolledTimeGraph::component_index(const std::string& name) const {
    for (std::size_t i = 0; i < components_.size(); ++i) {
        if (components_[i].name == name) return static_cast<int>(i);
    }
    throw std::invalid_argument("graph: unknown component '" + name + "'");
}

bool RolledTimeGraph::has_edge(const RolledEdge& e) const {
    RolledEdge norm = e;
    if (norm.kind == EdgeKind::Bidirected && norm.lag == 0 && norm.source > norm.target) {
        std::swap(norm.source, norm.target);
    }
    return std::binary_search(edges_.begin(), edges_.end(), norm);
}

RolledTimeGraph RolledTimeGraph::without_edge(const RolledEdge& e, std::string name) const {
    auto edges = edges_;
    RolledEdge norm = e;
    if (norm.kind == EdgeKind::Bidirected && norm.lag == 0 && norm.source > norm.target) {
        std::swap(norm.source, norm.target);
    }
    edges.erase(std::remove(edges.begin(), edges.end(), norm), edges.end());
    return RolledTimeGraph(components_, std::move(edges), name.empty() ? name_ : std::move(name));
}

UnrolledGraph::UnrolledGraph(std::vector<Component> components, std::vector<Node> nodes,
                             std::vector<Edge> directed, std::vector<Edge> bidirected, int t_min,
                             int t_max)
    : components_(std::move(components)), nodes_(std::move(nodes)), t_min_(t_min), t_max_(t_max) {
    sort_unique(nodes_);
    for (const auto& n : nodes_) {
        if (n.component < 0 || n.component >= static_cast<int>(components_.size())) {
            throw std::invalid_argument("graph: node references unknown component");
        }
        if (n.time < t_min_ || n.time > t_max_) {
            throw std::invalid_argument("graph: node outside window");
        }
    }
    const std::size_t n = nodes_.size();
    children_.assign(n, {});
    parents_.assign(n, {});
    siblings_.assign(n, {});
    for (const auto& e : directed) {
        int a = index(e.from);
        int b = index(e.to);
        if (a == b) throw std::invalid_argument("graph: directed self loop");
        children_[a].push_back(b);
        parents_[b].push_back(a);
    }
    for (const auto& e : bidirected) {
        int a = index(e.from);
        int b = index(e.to);
        if (a == b) throw std::invalid_argument("graph: bidirected self loop");
        siblings_[a].push_back(b);
        siblings_[b].push_back(a);
    }
    for (std::size_t i = 0; i < n; ++i) {
        sort_unique(children_[i]);
        sort_unique(parents_[i]);
        sort_unique(siblings_[i]);
    }

    std::vector<int> indeg(n);
    std::deque<int> queue;
    for (std::size_t i = 0; i < n; ++i) {
        indeg[i] = static_cast<int>(parents_[i].size());
        if (indeg[i] == 0) queue.push_back(static_cast<int>(i));
    }
    std::size_t seen = 0;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        ++seen;
        for (int v : children_[u]) {
            if (--indeg[v] == 0) queue.push_back(v);
        }
    }
    if (seen != n) throw std::invalid_argument("graph: directed cycle");
}

bool UnrolledGraph::contains(const Node& n) const {
    return std::binary_search(nodes_.begin(), nodes_.end(), n);
}

int UnrolledGraph::index(const Node& n) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), n);
    if (it == nodes_.end() || *it != n) throw std::out_of_range("graph: node not in graph");
    return static_cast<int>(it - nodes_.begin());
}

bool UnrolledGraph::has_directed(const Node& a, const Node& b) const {
    if (!contains(a) || !contains(b)) return false;
    const auto& ch = children_[index(a)];
    return std::binary_search(ch.begin(), ch.end(), index(b));
}

bool UnrolledGraph::has_bidirected(const Node& a, const Node& b) const {
    if (!contains(a) || !contains(b)) return false;
    const auto& sb = siblings_[index(a)];
    return std::binary_search(sb.begin(), sb.end(), index(b));
}

std::vector<UnrolledGraph::Edge> UnrolledGraph::directed_edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        for (int c : children_[i]) out.push_back({nodes_[i], nodes_[c]});
    }
    return out;
}

std::vector<UnrolledGraph::Edge> UnrolledGraph::bidirected_edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        for (int s : siblings_[i]) {
            if (static_cast<int>(i) < s) out.push_back({nodes_[i], nodes_[s]});
        }
    }
    return out;
}

std::string UnrolledGraph::label(const Node& n) const {
    return components_.at(static_cast<std::size_t>(n.component)).name + "@" +
           std::to_string(n.time);
}

bool operator==(const UnrolledGraph& a, const UnrolledGraph& b) {
    return a.components_ == b.components_ && a.nodes_ == b.nodes_ &&
           a.directed_edges() == b.directed_edges() &&
           a.bidirected_edges() == b.bidirected_edges();
}

UnrolledGraph unroll(const RolledTimeGraph& g, int window_length) {
    if (window_length < g.max_lag() + 1) {
        throw std::invalid_argument("unroll: window of length " + std::to_string(window_length) +
                                    " cannot hold edges of lag " + std::to_string(g.max_lag()) +
                                    " (need at least max_lag + 1)");
    }
    return unroll(g, 0, window_length - 1);
}

UnrolledGraph unroll(const RolledTimeGraph& g, int t_min, int t_max) {
    if (t_max - t_min + 1 < g.max_lag() + 1) {
        throw std::invalid_argument("unroll: window shorter than max_lag + 1");
    }
    const int d = static_cast<int>(g.components().size());
    std::vector<Node> nodes;
    for (int t = t_min; t <= t_max; ++t) {
        for (int c = 0; c < d; ++c) nodes.push_back({t, c});
    }
    std::vector<UnrolledGraph::Edge> directed;
    std::vector<UnrolledGraph::Edge> bidirected;
    for (const auto& e : g.edges()) {
        for (int t = t_min + e.lag; t <= t_max; ++t) {
            UnrolledGraph::Edge edge{{t - e.lag, e.source}, {t, e.target}};
            (e.kind == EdgeKind::Directed ? directed : bidirected).push_back(edge);
        }
    }
    return UnrolledGraph(g.components(), std::move(nodes), std::move(directed),
                         std::move(bidirected), t_min, t_max);
}

UnrolledGraph marginalize(const UnrolledGraph& g, const NodeSet& keep) {
    const int n = static_cast<int>(g.size());
    std::vector<char> kept(n, 0);
    for (const auto& k : keep) kept[g.index(k)] = 1;
    if (keep.size() == g.size()) return g;

    const std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
    using Bits = std::vector<std::uint64_t>;
    auto set_bit = [](Bits& b, int i) { b[static_cast<std::size_t>(i) >> 6] |= 1ULL << (i & 63); };
    auto test_bit = [](const Bits& b, int i) {
        return (b[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1ULL;
    };
    auto intersects = [&](const Bits& a, const Bits& b) {
        for (std::size_t w = 0; w < words; ++w) {
            if (a[w] & b[w]) return true;
        }
        return false;
    };

    // anc[j]: dropped nodes with a directed path into j whose intermediate
    // nodes are all dropped.
    std::vector<Bits> anc(n, Bits(words, 0));
    std::vector<int> kept_ids;
    for (int j = 0; j < n; ++j) {
        if (!kept[j]) continue;
        kept_ids.push_back(j);
        std::deque<int> queue;
        for (int p : g.parents(j)) {
            if (!kept[p] && !test_bit(anc[j], p)) {
                set_bit(anc[j], p);
                queue.push_back(p);
            }
        }
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int p : g.parents(u)) {
                if (!kept[p] && !test_bit(anc[j], p)) {
                    set_bit(anc[j], p);
                    queue.push_back(p);
                }
            }
        }
    }

    std::vector<UnrolledGraph::Edge> directed;
    std::vector<UnrolledGraph::Edge> bidirected;
    for (int j : kept_ids) {
        // i -> j directly, or i -> (dropped)+ -> j
        for (int p : g.parents(j)) {
            if (kept[p]) directed.push_back({g.node(p), g.node(j)});
        }
        for (int u = 0; u < n; ++u) {
            if (!test_bit(anc[j], u)) continue;
            for (int p : g.parents(u)) {
                if (kept[p]) directed.push_back({g.node(p), g.node(j)});
            }
        }
    }

    // i <-> j iff i <- ... <- U -> ... -> j through dropped nodes, or
    // i <- ... <- a <-> b -> ... -> j where a, b are dropped or endpoints.
    // reach[j] = anc[j] + {j}; spouse[i] = siblings of anything in reach[i].
    std::vector<Bits> reach(n);
    std::vector<Bits> spouse(n);
    for (int j : kept_ids) {
        reach[j] = anc[j];
        set_bit(reach[j], j);
        spouse[j] = Bits(words, 0);
        for (int a = 0; a < n; ++a) {
            if (!test_bit(reach[j], a)) continue;
            for (int b : g.siblings(a)) set_bit(spouse[j], b);
        }
    }
    for (std::size_t x = 0; x < kept_ids.size(); ++x) {
        int i = kept_ids[x];
        for (std::size_t y = x + 1; y < kept_ids.size(); ++y) {
            int j = kept_ids[y];
            if (intersects(anc[i], anc[j]) || intersects(spouse[i], reach[j])) {
                bidirected.push_back({g.node(i), g.node(j)});
            }
        }
    }
    std::vector<Node> nodes(keep.begin(), keep.end());
    return UnrolledGraph(g.components(), std::move(nodes), std::move(directed),
                         std::move(bidirected), g.t_min(), g.t_max());
}

UnrolledGraph marginalize_latents(const UnrolledGraph& g) {
    NodeSet keep;
    for (const auto& n : g.nodes()) {
        if (g.components()[static_cast<std::size_t>(n.component)].observed) keep.insert(n);
    }
    return marginalize(g, keep);
}

NodeSet descendants(const UnrolledGraph& g, const NodeSet& s) {
    std::vector<char> mark(g.size(), 0);
    std::deque<int> queue;
    for (const auto& v : s) {
        for (int c : g.children(g.index(v))) {
            if (!mark[c]) {
                mark[c] = 1;
                queue.push_back(c);
            }
        }
    }
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int c : g.children(u)) {
            if (!mark[c]) {
                mark[c] = 1;
                queue.push_back(c);
            }
        }
    }
    NodeSet out;
    for (std::size_t i = 0; i < mark.size(); ++i) {
        if (mark[i]) out.insert(g.node(static_cast<int>(i)));
    }
    return out;
}

NodeSet ancestors_closed(const UnrolledGraph& g, const NodeSet& s) {
    std::vector<char> mark(g.size(), 0);
    std::deque<int> queue;
    for (const auto& v : s) {
        int i = g.index(v);
        if (!mark[i]) {
            mark[i] = 1;
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int p : g.parents(u)) {
            if (!mark[p]) {
                mark[p] = 1;
                queue.push_back(p);
            }
        }
    }
    NodeSet out;
    for (std::size_t i = 0; i < mark.size(); ++i) {
        if (mark[i]) out.insert(g.node(static_cast<int>(i)));
    }
    return out;
}

UnrolledGraph remove_direct_edges(const UnrolledGraph& g, const NodeSet& x, const Node& y) {
    if (!g.contains(y)) throw std::invalid_argument("remove_direct_edges: target not in graph");
    for (const auto& v : x) {
        if (!g.contains(v)) throw std::invalid_argument("remove_direct_edges: source not in graph");
    }
    auto directed = g.directed_edges();
    std::erase_if(directed, [&](const UnrolledGraph::Edge& e) {
        return e.to == y && x.contains(e.from);
    });
    return UnrolledGraph(g.components(), g.nodes(), std::move(directed), g.bidirected_edges(),
                         g.t_min(), g.t_max());
}

}  // namespace civ::graph
