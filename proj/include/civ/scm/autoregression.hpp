#pragma once

#include <span>
#include <vector>

namespace civ::scm {

/// Spectral radius of the companion matrix of x_t = sum_k phi[k-1] x_{t-k}; 0 for an empty vector.
[[nodiscard]] double ar_spectral_radius(std::span<const double> phi);

struct ArFit {
    double intercept = 0.0;
    std::vector<double> coefficients;
    double residual_sd = 0.0;
};

/**
 * Conditional least squares: regress x_t on (1, x_{t-1}, ..., x_{t-order}).
 * Order 0 returns only the sample mean and sd. Throws std::invalid_argument
 * when order >= length or the lag design is singular (e.g. a constant series).
 */
[[nodiscard]] ArFit fit_ar(std::span<const double> x, int order);

/// Sample autocorrelation sum (x_t - m)(x_{t+lag} - m) / sum (x_t - m)^2.
[[nodiscard]] double observed_autocorrelation(std::span<const double> x, int lag);

}  // namespace civ::scm
