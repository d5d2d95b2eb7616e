#pragma once

#include <string>
#include <utility>
#include <vector>

#include "civ/graph/builtin.hpp"
#include "civ/graph/time_graph.hpp"

namespace civ::scm {

using graph::ModelKind;

/**
 * Coefficients of the linear equilibrium market models.
 *
 * Units: quantities in MWh/h, prices in EUR/MWh, slopes in MW/(EUR/MWh).
 * Demand:  D_t = D_0 + beta_P P_t + beta_D1 D_{t-1} + U^D_t        (Model I)
 *          D_t = A_t + B_t,  A_t = A_0 + beta_P P_t + U^A_t,
 *                            B_t = B_0 + beta_B1 B_{t-1} + U^B_t    (Model II)
 *          D_t = D_0 + beta_P P_t + beta_P1 P_{t-1} + U^D_t        (Model III)
 * Supply:  S_t = S_0 + gamma_P P_t + gamma_W W_t + U^S_t
 * Wind:    W_t = c + sum_k wind_ar[k-1] W_{t-k} + U^W_t, mean wind_mean
 */
struct ModelParams {
    double beta_P = -100.0;
    double beta_D1 = 0.0;
    double beta_B1 = 0.0;
    double beta_P1 = 0.0;
    double gamma_P = 500.0;
    double gamma_W = 1.0;
    double S_0 = 25'000.0;
    double D_0 = 0.0;
    double A_0 = 0.0;
    double B_0 = 0.0;
    std::vector<double> wind_ar{0.9};
    double wind_mean = 14'100.0;
    double sigma_S = 1.0;
    double sigma_D = 2'000.0;
    double sigma_A = 1'414.213562373095;
    double sigma_B = 1'414.213562373095;
    double sigma_W = 4'400.0;
    // Stationary share of mean demand carried by the price-insensitive part (Model II).
    double b_share = 0.5;

    /// Assigns a named scalar ("beta_D1", "wind_ar" as "0.9;0.05", ...).
    void set(const std::string& key, const std::string& value);
    /// All keys accepted by `set`.
    [[nodiscard]] static std::vector<std::string> keys();
};

/// Structure plus coefficients; what `simulate` consumes.
struct SimulatorSpec {
    ModelKind structure = ModelKind::InertialDemand;  // one of Models I–III
    ModelParams params;
};

/// Models I–III; the special cases map onto Model I with a zeroed coefficient.
[[nodiscard]] ModelKind base_structure(ModelKind kind);

/// Throws std::invalid_argument when the parameters violate clearing or stationarity.
void validate(ModelKind kind, const ModelParams& p);

/**
 * Validates and pairs the simulator with its (marginalized) rolled graph.
 * Edges whose coefficient is exactly zero are left out of the graph.
 */
[[nodiscard]] std::pair<SimulatorSpec, graph::RolledTimeGraph> build_model(ModelKind kind,
                                                                           const ModelParams& p);

/// Defaults used throughout the simulation study, with D_0 solved for 60,000 MWh/h.
[[nodiscard]] ModelParams default_params(ModelKind kind);

/**
 * Demand intercept D_0 giving stationary mean demand `target` (fixed point of
 * the expected structural equations). For Model II the mean of B is fixed at
 * b_share * target and D_0 = A_0 + B_0.
 */
[[nodiscard]] double solve_intercept(ModelKind kind, const ModelParams& p, double target);

/// Copy of `p` with D_0 (and A_0, B_0) set by `solve_intercept`.
[[nodiscard]] ModelParams with_intercept(ModelKind kind, ModelParams p, double target);

struct StationaryMeans {
    double wind;
    double price;
    double demand;
};

[[nodiscard]] StationaryMeans stationary_means(ModelKind kind, const ModelParams& p);

/// Largest modulus among the AR roots driving the model (wind and demand/price memory).
[[nodiscard]] double persistence(ModelKind kind, const ModelParams& p);

}  // namespace civ::scm
