#pragma once

#include <stdexcept>
#include <string>

#include "civ/scm/model.hpp"
#include "json.hpp"

namespace civ::scm {

inline void to_json(nlohmann::json& j, const ModelParams& p) {
    j = nlohmann::json{{"beta_P", p.beta_P},   {"beta_D1", p.beta_D1}, {"beta_B1", p.beta_B1},
                       {"beta_P1", p.beta_P1}, {"gamma_P", p.gamma_P}, {"gamma_W", p.gamma_W},
                       {"S_0", p.S_0},         {"D_0", p.D_0},         {"A_0", p.A_0},
                       {"B_0", p.B_0},         {"wind_ar", p.wind_ar}, {"wind_mean", p.wind_mean},
                       {"sigma_S", p.sigma_S}, {"sigma_D", p.sigma_D}, {"sigma_A", p.sigma_A},
                       {"sigma_B", p.sigma_B}, {"sigma_W", p.sigma_W}, {"b_share", p.b_share}};
}

/// Keys present in `j` overwrite the matching fields; unknown keys are rejected.
inline void merge_params(ModelParams& p, const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("model parameters must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "wind_ar") {
            p.wind_ar = value.get<std::vector<double>>();
        } else if (value.is_number()) {
            p.set(key, nlohmann::json(value.get<double>()).dump());
        } else {
            throw std::invalid_argument("model parameter '" + key + "' must be a number");
        }
    }
}

inline void from_json(const nlohmann::json& j, ModelParams& p) {
    p = ModelParams{};
    merge_params(p, j);
}

}  // namespace civ::scm
