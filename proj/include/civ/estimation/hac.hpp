#pragma once

#include <Eigen/Dense>

namespace civ::estimation {

/// Newey-West rule floor(4 (n/100)^(2/9)).
[[nodiscard]] int default_bandwidth(Eigen::Index n);

/**
 * Bartlett-kernel long-run variance of the rows of `g` (n x k, mean-zero moments):
 * Gamma_0 + sum_{l=1..bw} (1 - l/(bw+1)) (Gamma_l + Gamma_l').
 */
[[nodiscard]] Eigen::MatrixXd long_run_variance(const Eigen::MatrixXd& g, int bandwidth);

/**
 * Sandwich covariance of an IV coefficient vector with projected regressors
 * `moment_matrix` (n x p, i.e. P_I r_X) and structural residuals `residuals`:
 * (M'M)^-1 S (M'M)^-1 with S the long-run variance of M_t u_t.
 * Bandwidth 0 gives the White covariance.
 */
[[nodiscard]] Eigen::MatrixXd hac_cov(const Eigen::MatrixXd& moment_matrix,
                                      const Eigen::VectorXd& residuals, int bandwidth);

/// Homoskedastic 2SLS covariance sigma^2 (M'M)^-1 with sigma^2 = u'u / n.
[[nodiscard]] Eigen::MatrixXd classical_cov(const Eigen::MatrixXd& moment_matrix,
                                            const Eigen::VectorXd& residuals);

}  // namespace civ::estimation
