#include "civ/graph/separation.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace civ::graph {

namespace {

using Via = PathStep::Via;

struct Neighbor {
    int node;
    Via via;
    bool head_at_self;  // arrowhead at the node we leave from
    bool head_at_next;  // arrowhead at the node we arrive at
};

// Adjacent (node, edge) pairs of v in node order; ties broken by edge kind.
std::vector<Neighbor> neighbors(const UnrolledGraph& g, int v) {
    std::vector<Neighbor> out;
    for (int c : g.children(v)) out.push_back({c, Via::Forward, false, true});
    for (int p : g.parents(v)) out.push_back({p, Via::Backward, true, false});
    for (int s : g.siblings(v)) out.push_back({s, Via::Bidirected, true, true});
    std::sort(out.begin(), out.end(), [](const Neighbor& x, const Neighbor& y) {
        if (x.node != y.node) return x.node < y.node;
        return static_cast<int>(x.via) < static_cast<int>(y.via);
    });
    return out;
}

struct Context {
    const UnrolledGraph& g;
    std::vector<char> in_a, in_b, in_s, in_anc_s;
    std::vector<std::vector<Neighbor>> adj;
};

bool passes(const Context& ctx, int v, bool head_in, bool head_out) {
    bool collider = head_in && head_out;
    return collider ? ctx.in_anc_s[v] != 0 : ctx.in_s[v] == 0;
}

// Breadth-first reachability over (node, arrived-with-arrowhead) states;
// returns the minimal walk length to B or -1.
int reach_distance(const Context& ctx) {
    const int n = static_cast<int>(ctx.g.size());
    std::vector<int> dist(2 * static_cast<std::size_t>(n), -1);
    std::deque<int> queue;
    for (int a = 0; a < n; ++a) {
        if (!ctx.in_a[a]) continue;
        for (const auto& nb : ctx.adj[a]) {
            int state = 2 * nb.node + (nb.head_at_next ? 1 : 0);
            if (dist[state] < 0) {
                dist[state] = 1;
                queue.push_back(state);
            }
        }
    }
    while (!queue.empty()) {
        int state = queue.front();
        queue.pop_front();
        int v = state / 2;
        bool head_in = state % 2 == 1;
        if (ctx.in_b[v]) return dist[state];
        if (ctx.in_a[v]) continue;
        for (const auto& nb : ctx.adj[v]) {
            if (!passes(ctx, v, head_in, nb.head_at_self)) continue;
            int next = 2 * nb.node + (nb.head_at_next ? 1 : 0);
            if (dist[next] < 0) {
                dist[next] = dist[state] + 1;
                queue.push_back(next);
            }
        }
    }
    return -1;
}

// Undirected hop distance from every node to B, used to prune the search.
std::vector<int> hops_to_b(const Context& ctx) {
    const int n = static_cast<int>(ctx.g.size());
    std::vector<int> hops(n, std::numeric_limits<int>::max());
    std::deque<int> queue;
    for (int v = 0; v < n; ++v) {
        if (ctx.in_b[v]) {
            hops[v] = 0;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (const auto& nb : ctx.adj[v]) {
            if (hops[nb.node] == std::numeric_limits<int>::max()) {
                hops[nb.node] = hops[v] + 1;
                queue.push_back(nb.node);
            }
        }
    }
    return hops;
}

struct Search {
    const Context& ctx;
    const std::vector<int>& hops;
    int limit;
    std::vector<char> on_path;
    Path path;

    bool extend(int v, bool head_in, int depth) {
        if (ctx.in_b[v]) return depth > 0;
        if (depth > 0 && ctx.in_a[v]) return false;
        for (const auto& nb : ctx.adj[v]) {
            if (on_path[nb.node]) continue;
            if (depth + 1 + hops[nb.node] > limit) continue;
            if (depth > 0 && !passes(ctx, v, head_in, nb.head_at_self)) continue;
            on_path[nb.node] = 1;
            path.push_back({ctx.g.node(nb.node), nb.via});
            if (extend(nb.node, nb.head_at_next, depth + 1)) return true;
            path.pop_back();
            on_path[nb.node] = 0;
        }
        return false;
    }
};

Path shortest_witness(const Context& ctx, int lower_bound) {
    const int n = static_cast<int>(ctx.g.size());
    auto hops = hops_to_b(ctx);
    for (int limit = std::max(1, lower_bound); limit < n; ++limit) {
        for (int a = 0; a < n; ++a) {
            if (!ctx.in_a[a]) continue;
            Search s{ctx, hops, limit, std::vector<char>(n, 0), {}};
            s.on_path[a] = 1;
            s.path.push_back({ctx.g.node(a), Via::Start});
            if (s.extend(a, false, 0)) return s.path;
        }
    }
    return {};
}

}  // namespace

SeparationResult d_separated(const UnrolledGraph& g, const NodeSet& a, const NodeSet& b,
                             const NodeSet& s, bool want_witness) {
    const std::size_t n = g.size();
    Context ctx{g, std::vector<char>(n, 0), std::vector<char>(n, 0), std::vector<char>(n, 0),
                std::vector<char>(n, 0), {}};
    auto mark = [&](const NodeSet& set, std::vector<char>& flags, const char* what) {
        for (const auto& v : set) {
            if (!g.contains(v)) {
                throw std::invalid_argument(std::string("d_separated: ") + what + " node " +
                                            g.label(v) + " not in graph");
            }
            flags[g.index(v)] = 1;
        }
    };
    mark(a, ctx.in_a, "A");
    mark(b, ctx.in_b, "B");
    mark(s, ctx.in_s, "S");
    for (std::size_t i = 0; i < n; ++i) {
        if (ctx.in_a[i] + ctx.in_b[i] + ctx.in_s[i] > 1) {
            throw std::invalid_argument("d_separated: A, B and S must be mutually disjoint (" +
                                        g.label(g.node(static_cast<int>(i))) + ")");
        }
    }
    for (const auto& v : ancestors_closed(g, s)) ctx.in_anc_s[g.index(v)] = 1;
    ctx.adj.resize(n);
    for (std::size_t i = 0; i < n; ++i) ctx.adj[i] = neighbors(g, static_cast<int>(i));

    SeparationResult result;
    int dist = reach_distance(ctx);
    if (dist < 0) return result;
    result.separated = false;
    if (want_witness) result.witness = shortest_witness(ctx, dist);
    return result;
}

std::string render_path(const UnrolledGraph& g, const Path& p, int time_offset) {
    std::string out;
    for (const auto& step : p) {
        switch (step.via) {
            case Via::Start: break;
            case Via::Forward: out += " -> "; break;
            case Via::Backward: out += " <- "; break;
            case Via::Bidirected: out += " <-> "; break;
        }
        Node shifted{step.node.time - time_offset, step.node.component};
        out += g.components().at(static_cast<std::size_t>(shifted.component)).name + "@" +
               std::to_string(shifted.time);
    }
    return out;
}

}  // namespace civ::graph
