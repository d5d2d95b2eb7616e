#include "civ/graph/builtin.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace civ::graph {

namespace {

constexpr int W = 0;
constexpr int P = 1;
constexpr int D = 2;
constexpr int B = 3;

RolledEdge directed(int source, int lag, int target) {
    return {EdgeKind::Directed, source, lag, target};
}

RolledEdge bidirected(int source, int lag, int target) {
    return {EdgeKind::Bidirected, source, lag, target};
}

std::vector<Component> observed_wpd() { return {{"W", true}, {"P", true}, {"D", true}}; }

RolledTimeGraph model_one(std::string name) {
    return RolledTimeGraph(observed_wpd(),
                           {directed(W, 1, W), directed(W, 0, P), directed(D, 1, P),
                            directed(P, 0, D), directed(D, 1, D), bidirected(P, 0, D)},
                           std::move(name));
}

}  // namespace

std::string model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::InertialDemand: return "model1";
        case ModelKind::HeterogeneousDemand: return "model2";
        case ModelKind::DemandShifting: return "model3";
        case ModelKind::IidInstrument: return "iid_instrument";
        case ModelKind::NoDemandMemory: return "no_demand_ar";
        case ModelKind::NoPriceResponse: return "no_price_response";
    }
    throw std::logic_error("unreachable model kind");
}

ModelKind parse_model_kind(const std::string& text) {
    std::string t;
    for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "model1" || t == "i" || t == "1" || t == "modeli") return ModelKind::InertialDemand;
    if (t == "model2" || t == "ii" || t == "2" || t == "modelii") {
        return ModelKind::HeterogeneousDemand;
    }
    if (t == "model3" || t == "iii" || t == "3" || t == "modeliii") {
        return ModelKind::DemandShifting;
    }
    for (auto k : {ModelKind::IidInstrument, ModelKind::NoDemandMemory, ModelKind::NoPriceResponse}) {
        if (t == model_name(k)) return k;
    }
    throw std::invalid_argument("unknown model '" + text + "'");
}

RolledTimeGraph builtin_graph(ModelKind kind) {
    switch (kind) {
        case ModelKind::InertialDemand: return model_one("model1");
        case ModelKind::HeterogeneousDemand:
            // B is the price-insensitive demand with its own inertia; it stays latent.
            return RolledTimeGraph({{"W", true}, {"P", true}, {"D", true}, {"B", false}},
                                   {directed(W, 1, W), directed(W, 0, P), directed(B, 1, P),
                                    directed(B, 1, B), directed(B, 0, D), directed(P, 0, D),
                                    bidirected(P, 0, D), bidirected(P, 0, B)},
                                   "model2");
        case ModelKind::DemandShifting:
            return RolledTimeGraph(observed_wpd(),
                                   {directed(W, 1, W), directed(W, 0, P), directed(P, 1, P),
                                    directed(P, 0, D), directed(P, 1, D), bidirected(P, 0, D)},
                                   "model3");
        case ModelKind::IidInstrument:
            return model_one("").without_edge(directed(W, 1, W), "iid_instrument");
        case ModelKind::NoDemandMemory:
            return model_one("")
                .without_edge(directed(D, 1, D))
                .without_edge(directed(D, 1, P), "no_demand_ar");
        case ModelKind::NoPriceResponse:
            return model_one("").without_edge(directed(P, 0, D), "no_price_response");
    }
    throw std::logic_error("unreachable model kind");
}

std::vector<ModelKind> builtin_kinds() {
    return {ModelKind::InertialDemand, ModelKind::HeterogeneousDemand, ModelKind::DemandShifting,
            ModelKind::IidInstrument,  ModelKind::NoDemandMemory,      ModelKind::NoPriceResponse};
}

}  // namespace civ::graph
