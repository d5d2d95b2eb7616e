#pragma once

#include <string>
#include <vector>

#include "civ/estimator_spec.hpp"

namespace civ::estimation {

/// Column names the catalogue refers to.
struct CatalogueNames {
    std::string instrument = "W";
    std::string price = "P";
    std::string demand = "D";
};

/**
 * Estimators #1–#8 for the effect P_t -> D_t:
 *
 *   #1  CIV(W_t | P_t -> D_t | ∅)                                naive IV
 *   #2  CIV(W_t | P_t -> D_t | W_{t-1..t-L})
 *   #3  CIV(W_t | P_t -> D_t | D_{t-1})
 *   #4  CIV(W_t | P_t -> D_t | W,P,D_{t-1..t-L})                  local projection
 *   #5  CIV(W_{t..t-L} | (P_t, D_{t-1}) -> D_t | ∅)               nuisance IV
 *   #6  CIV(W_{t..t-L} | (P_t, P_{t-1}) -> D_t | ∅)
 *   #7  CIV(W_{t..t-L} | (P_t, P_{t-1}) -> D_t | D_{t-1})
 *   #8  CIV(W_{t..t-L} | (P_t, P_{t-1}, D_{t-1}) -> D_t | ∅)
 *
 * Labels are accepted as "3" or "#3". Throws std::invalid_argument for an
 * unknown label or L < 1.
 */
[[nodiscard]] EstimatorSpec catalogue(const std::string& label, int lag_depth,
                                      const CatalogueNames& names = {});
[[nodiscard]] EstimatorSpec catalogue(int number, int lag_depth, const CatalogueNames& names = {});

[[nodiscard]] std::vector<std::string> catalogue_labels();

}  // namespace civ::estimation
