#include "civ/graph/civ_check.hpp"

#include <algorithm>
#include <stdexcept>

namespace civ::graph {

namespace {

struct Placement {
    int length;
    int base;  // absolute time of relative offset 0
};

// Equal past and future margin around the span [lo, hi] of relative offsets.
Placement place(int lo, int hi, int max_lag, int requested) {
    int span = hi - lo;
    int length = requested > 0 ? requested : 3 * (span + max_lag) + 3;
    if (length < span + max_lag + 1) {
        throw std::invalid_argument("window of length " + std::to_string(length) +
                                    " too short for the query");
    }
    int first = (length - 1 - span) / 2;
    return {length, first - lo};
}

std::vector<std::string> labels(const UnrolledGraph& g, const Path& p, int base) {
    std::vector<std::string> out;
    for (const auto& step : p) {
        out.push_back(g.components().at(static_cast<std::size_t>(step.node.component)).name + "@" +
                      std::to_string(step.node.time - base));
    }
    return out;
}

int observed_component(const RolledTimeGraph& g, const LaggedRef& r) {
    if (r.lag < 0) throw std::invalid_argument("negative lag in " + to_string(r));
    int c = g.component_index(r.component);
    if (!g.components()[static_cast<std::size_t>(c)].observed) {
        throw std::invalid_argument("component '" + r.component + "' is latent");
    }
    return c;
}

CivVerdict evaluate(const RolledTimeGraph& g, const EstimatorSpec& spec, int requested) {
    const int q = spec.max_lag();
    auto [length, base] = place(-q, 0, g.max_lag(), requested);
    auto full = unroll(g, 0, length - 1);
    auto observed = marginalize_latents(full);

    auto node_of = [&](const LaggedRef& r) {
        return Node{base - r.lag, observed_component(g, r)};
    };
    auto set_of = [&](const std::vector<LaggedRef>& refs) {
        NodeSet out;
        for (const auto& r : refs) out.insert(node_of(r));
        return out;
    };
    const NodeSet instruments = set_of(spec.instruments);
    const NodeSet regressors = set_of(spec.regressors);
    const NodeSet conditioning = set_of(spec.conditioning);
    const Node outcome = node_of(spec.outcome);

    CivVerdict v;
    v.window = length;

    auto cut = remove_direct_edges(observed, regressors, outcome);
    auto sep = d_separated(cut, instruments, NodeSet{outcome}, conditioning);
    v.civ1 = sep.separated;
    if (!sep.separated) {
        v.witness_path = labels(cut, sep.witness, base);
        v.witness_rendered = render_path(cut, sep.witness, base);
    }

    // B must avoid X, Y and every descendant of Y.
    NodeSet forbidden = descendants(observed, NodeSet{outcome});
    forbidden.insert(outcome);
    forbidden.insert(regressors.begin(), regressors.end());
    v.civ2 = true;
    for (const auto& b : conditioning) {
        if (forbidden.contains(b)) {
            v.civ2 = false;
            v.witness_descendant = observed.components()[static_cast<std::size_t>(b.component)].name +
                                   "@" + std::to_string(b.time - base);
            break;
        }
    }
    return v;
}

}  // namespace

CivVerdict check_civ_graphical(const RolledTimeGraph& g, const EstimatorSpec& spec,
                               const WindowPolicy& policy) {
    spec.validate();
    auto verdict = evaluate(g, spec, policy.length);
    if (policy.recheck) {
        auto wider = evaluate(g, spec, verdict.window + g.max_lag() + 1);
        if (wider.civ1 != verdict.civ1 || wider.civ2 != verdict.civ2) {
            throw std::runtime_error("CIV verdict for " + spec.label +
                                     " did not stabilize at window " +
                                     std::to_string(verdict.window));
        }
    }
    return verdict;
}

RelativeSeparation d_separated_relative(const RolledTimeGraph& g, const RelativeQuery& q,
                                        const WindowPolicy& policy) {
    int lo = 0;
    int hi = 0;
    bool first = true;
    for (const auto* group : {&q.a, &q.b, &q.given}) {
        for (const auto& [name, offset] : *group) {
            lo = first ? offset : std::min(lo, offset);
            hi = first ? offset : std::max(hi, offset);
            first = false;
        }
    }
    if (q.a.empty() || q.b.empty()) throw std::invalid_argument("dsep: A and B must be non-empty");

    auto run = [&](int requested) {
        auto [length, base] = place(lo, hi, g.max_lag(), requested);
        auto observed = marginalize_latents(unroll(g, 0, length - 1));
        auto set_of = [&](const std::vector<std::pair<std::string, int>>& refs) {
            NodeSet out;
            for (const auto& [name, offset] : refs) {
                int c = g.component_index(name);
                if (!g.components()[static_cast<std::size_t>(c)].observed) {
                    throw std::invalid_argument("component '" + name + "' is latent");
                }
                out.insert(Node{base + offset, c});
            }
            return out;
        };
        auto res = d_separated(observed, set_of(q.a), set_of(q.b), set_of(q.given));
        RelativeSeparation out;
        out.separated = res.separated;
        out.window = length;
        if (!res.separated) {
            out.witness_path = labels(observed, res.witness, base);
            out.witness_rendered = render_path(observed, res.witness, base);
        }
        return out;
    };
    auto result = run(policy.length);
    if (policy.recheck) {
        auto wider = run(result.window + g.max_lag() + 1);
        if (wider.separated != result.separated) {
            throw std::runtime_error("d-separation verdict did not stabilize at window " +
                                     std::to_string(result.window));
        }
    }
    return result;
}

}  // namespace civ::graph
