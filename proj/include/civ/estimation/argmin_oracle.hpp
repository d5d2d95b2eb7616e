#pragma once

#include <Eigen/Dense>

#include "civ/estimation/design.hpp"
#include "civ/estimator_spec.hpp"
#include "civ/timeseries.hpp"

namespace civ::estimation {

struct ArgminResult {
    Eigen::VectorXd beta;
    double objective = 0.0;
    int iterations = 0;
};

/**
 * Cross-check for the closed form: minimizes
 *     f(b) = g(b)' (r_I' r_I / n)^-1 g(b),   g(b) = r_I' (r_Y - r_X b) / n
 * by BFGS, with residualization done through the normal equations of the
 * conditioning block instead of the orthonormal basis.
 */
[[nodiscard]] ArgminResult numeric_argmin_oracle(const Design& d);
[[nodiscard]] ArgminResult numeric_argmin_oracle(const TimeSeriesDataset& ds,
                                                 const EstimatorSpec& spec,
                                                 const DesignOptions& opts = {});

/// The objective above, evaluated at b (exposed for tests).
[[nodiscard]] double civ_objective(const Design& d, const Eigen::VectorXd& b);

}  // namespace civ::estimation
