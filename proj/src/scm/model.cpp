#include "civ/scm/model.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "civ/scm/autoregression.hpp"

namespace civ::scm {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("parameter " + key + ": cannot parse '" + value + "'");
    }
    if (used != value.size()) {
        throw std::invalid_argument("parameter " + key + ": cannot parse '" + value + "'");
    }
    return v;
}

graph::RolledEdge directed(int s, int lag, int t) { return {graph::EdgeKind::Directed, s, lag, t}; }
graph::RolledEdge bidirected(int s, int t) { return {graph::EdgeKind::Bidirected, s, 0, t}; }

}  // namespace

void ModelParams::set(const std::string& key, const std::string& value) {
    if (key == "wind_ar") {
        wind_ar.clear();
        std::string token;
        std::istringstream in(value);
        while (std::getline(in, token, value.find(';') != std::string::npos ? ';' : ',')) {
            if (!token.empty()) wind_ar.push_back(parse_double(key, token));
        }
        return;
    }
    double v = parse_double(key, value);
    if (key == "beta_P") beta_P = v;
    else if (key == "beta_D1") beta_D1 = v;
    else if (key == "beta_B1") beta_B1 = v;
    else if (key == "beta_P1") beta_P1 = v;
    else if (key == "gamma_P") gamma_P = v;
    else if (key == "gamma_W") gamma_W = v;
    else if (key == "S_0") S_0 = v;
    else if (key == "D_0") D_0 = v;
    else if (key == "A_0") A_0 = v;
    else if (key == "B_0") B_0 = v;
    else if (key == "beta_W") wind_ar = {v};
    else if (key == "wind_mean") wind_mean = v;
    else if (key == "sigma_S") sigma_S = v;
    else if (key == "sigma_D") sigma_D = v;
    else if (key == "sigma_A") sigma_A = v;
    else if (key == "sigma_B") sigma_B = v;
    else if (key == "sigma_W") sigma_W = v;
    else if (key == "b_share") b_share = v;
    else throw std::invalid_argument("unknown model parameter '" + key + "'");
}

std::vector<std::string> ModelParams::keys() {
    return {"beta_P",  "beta_D1", "beta_B1", "beta_P1",   "gamma_P", "gamma_W", "S_0",
            "D_0",     "A_0",     "B_0",     "wind_ar",   "beta_W",  "wind_mean",
            "sigma_S", "sigma_D", "sigma_A", "sigma_B",   "sigma_W", "b_share"};
}

ModelKind base_structure(ModelKind kind) {
    switch (kind) {
        case ModelKind::HeterogeneousDemand: return ModelKind::HeterogeneousDemand;
        case ModelKind::DemandShifting: return ModelKind::DemandShifting;
        default: return ModelKind::InertialDemand;
    }
}

double persistence(ModelKind kind, const ModelParams& p) {
    double radius = ar_spectral_radius(p.wind_ar);
    const double denom = p.beta_P - p.gamma_P;
    switch (base_structure(kind)) {
        case ModelKind::InertialDemand:
            // reduced form: D_t = ... - beta_D1 gamma_P / (beta_P - gamma_P) D_{t-1}
            radius = std::max(radius, std::abs(p.beta_D1));
            radius = std::max(radius, std::abs(p.beta_D1 * p.gamma_P / denom));
            break;
        case ModelKind::HeterogeneousDemand: radius = std::max(radius, std::abs(p.beta_B1)); break;
        default: radius = std::max(radius, std::abs(p.beta_P1 / denom)); break;
    }
    return radius;
}

void validate(ModelKind kind, const ModelParams& p) {
    if (p.beta_P - p.gamma_P == 0.0) {
        throw std::invalid_argument("beta_P - gamma_P must be nonzero for the market to clear");
    }
    for (double s : {p.sigma_S, p.sigma_D, p.sigma_A, p.sigma_B, p.sigma_W}) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument("noise scales must be finite and non-negative");
        }
    }
    if (p.b_share < 0.0 || p.b_share > 1.0) throw std::invalid_argument("b_share must lie in [0, 1]");
    if (ar_spectral_radius(p.wind_ar) >= 1.0) {
        throw std::invalid_argument("wind AR polynomial is not stationary");
    }
    if (std::abs(p.beta_D1) >= 1.0 || std::abs(p.beta_B1) >= 1.0) {
        throw std::invalid_argument("|beta_D1| and |beta_B1| must be below 1");
    }
    if (persistence(kind, p) >= 1.0) {
        throw std::invalid_argument("model parameters are not stationary");
    }
}

std::pair<SimulatorSpec, graph::RolledTimeGraph> build_model(ModelKind kind, const ModelParams& p) {
    validate(kind, p);
    constexpr int W = 0, P = 1, D = 2, B = 3;
    std::vector<graph::RolledEdge> edges;
    for (std::size_t k = 0; k < p.wind_ar.size(); ++k) {
        if (p.wind_ar[k] != 0.0) edges.push_back(directed(W, static_cast<int>(k) + 1, W));
    }
    if (p.gamma_W != 0.0) edges.push_back(directed(W, 0, P));
    if (p.beta_P != 0.0) edges.push_back(directed(P, 0, D));
    edges.push_back(bidirected(P, D));

    const auto structure = base_structure(kind);
    std::vector<graph::Component> comps{{"W", true}, {"P", true}, {"D", true}};
    switch (structure) {
        case ModelKind::InertialDemand:
            if (p.beta_D1 != 0.0) {
                edges.push_back(directed(D, 1, D));
                edges.push_back(directed(D, 1, P));
            }
            break;
        case ModelKind::HeterogeneousDemand:
            comps.push_back({"B", false});
            edges.push_back(directed(B, 0, D));
            edges.push_back(bidirected(P, B));
            if (p.beta_B1 != 0.0) {
                edges.push_back(directed(B, 1, B));
                edges.push_back(directed(B, 1, P));
            }
            break;
        default:
            if (p.beta_P1 != 0.0) {
                edges.push_back(directed(P, 1, P));
                edges.push_back(directed(P, 1, D));
            }
            break;
    }
    graph::RolledTimeGraph g(std::move(comps), std::move(edges), graph::model_name(kind));
    return {SimulatorSpec{structure, p}, std::move(g)};
}

StationaryMeans stationary_means(ModelKind kind, const ModelParams& p) {
    const double ew = p.wind_mean;
    // Two linear equations in (E[D], E[P]): demand and market clearing.
    Eigen::Matrix2d m;
    Eigen::Vector2d rhs;
    m(1, 0) = 1.0;
    m(1, 1) = -p.gamma_P;
    rhs(1) = p.S_0 + p.gamma_W * ew;
    switch (base_structure(kind)) {
        case ModelKind::InertialDemand:
            m(0, 0) = 1.0 - p.beta_D1;
            m(0, 1) = -p.beta_P;
            rhs(0) = p.D_0;
            break;
        case ModelKind::HeterogeneousDemand:
            m(0, 0) = 1.0;
            m(0, 1) = -p.beta_P;
            rhs(0) = p.A_0 + p.B_0 / (1.0 - p.beta_B1);
            break;
        default:
            m(0, 0) = 1.0;
            m(0, 1) = -(p.beta_P + p.beta_P1);
            rhs(0) = p.D_0;
            break;
    }
    Eigen::Vector2d sol = m.fullPivLu().solve(rhs);
    return {ew, sol(1), sol(0)};
}

double solve_intercept(ModelKind kind, const ModelParams& p, double target) {
    validate(kind, p);
    if (p.gamma_P == 0.0) {
        throw std::invalid_argument("gamma_P = 0 pins mean demand to supply; no intercept solves it");
    }
    const double price = (target - p.S_0 - p.gamma_W * p.wind_mean) / p.gamma_P;
    switch (base_structure(kind)) {
        case ModelKind::InertialDemand: return target * (1.0 - p.beta_D1) - p.beta_P * price;
        case ModelKind::HeterogeneousDemand: {
            const double mean_b = p.b_share * target;
            const double b0 = mean_b * (1.0 - p.beta_B1);
            const double a0 = target - mean_b - p.beta_P * price;
            return a0 + b0;
        }
        default: return target - (p.beta_P + p.beta_P1) * price;
    }
}

ModelParams with_intercept(ModelKind kind, ModelParams p, double target) {
    p.D_0 = solve_intercept(kind, p, target);
    if (base_structure(kind) == ModelKind::HeterogeneousDemand) {
        const double mean_b = p.b_share * target;
        p.B_0 = mean_b * (1.0 - p.beta_B1);
        p.A_0 = p.D_0 - p.B_0;
    }
    return p;
}

ModelParams default_params(ModelKind kind) {
    ModelParams p;
    switch (kind) {
        case ModelKind::InertialDemand: p.beta_D1 = 0.7; break;
        case ModelKind::HeterogeneousDemand: p.beta_B1 = 0.9; break;
        case ModelKind::DemandShifting: p.beta_P1 = 50.0; break;
        case ModelKind::IidInstrument:
            p.beta_D1 = 0.7;
            p.wind_ar.clear();
            break;
        case ModelKind::NoDemandMemory: p.beta_D1 = 0.0; break;
        case ModelKind::NoPriceResponse:
            p.beta_D1 = 0.7;
            p.beta_P = 0.0;
            break;
    }
    return with_intercept(kind, p, 60'000.0);
}

}  // namespace civ::scm
