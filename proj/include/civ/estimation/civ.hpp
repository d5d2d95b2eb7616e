#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "civ/estimation/design.hpp"
#include "civ/estimator_spec.hpp"
#include "civ/timeseries.hpp"

namespace civ::estimation {

/// The residualized instruments are linearly dependent among themselves.
class CollinearInstrumentsError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Instruments carry no information on some combination of the regressors (CIV3).
class Civ3FailureError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EstimateOptions {
    DesignOptions design;
    /// Bartlett bandwidth; negative selects the Newey-West default.
    int bandwidth = -1;
    /// Threshold on the standardized sigma_min; negative selects 2 (sqrt p + sqrt q) / sqrt n.
    double civ3_tol = -1.0;
};

struct FirstStage {
    /// Coefficients of the residualized regressors on the residualized instruments (q x p).
    Eigen::MatrixXd pi;
    /// Standard deviation of each residualized instrument.
    Eigen::VectorXd instrument_sd;
};

struct EstimateResult {
    std::string label;
    std::vector<std::string> regressor_names;
    Eigen::VectorXd beta_hat;
    Eigen::MatrixXd hac_cov;
    Eigen::VectorXd se;
    Eigen::MatrixXd ci;  // p x 2, columns lower and upper
    FirstStage first_stage;
    double civ3_sigma_min = 0.0;         // of r_X' r_I / n
    double civ3_sigma_min_std = 0.0;     // same on unit-variance residuals
    bool civ3_pass = false;
    int bandwidth = 0;
    std::size_t n_used = 0;
    std::vector<std::string> dropped_covariates;

    [[nodiscard]] double effect() const { return beta_hat(0); }
    [[nodiscard]] double lower() const { return ci(0, 0); }
    [[nodiscard]] double upper() const { return ci(0, 1); }
    [[nodiscard]] bool covers(double value) const { return lower() <= value && value <= upper(); }
};

/// Residualized blocks on which both the estimator and its diagnostics operate.
struct Residualized {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;
    Eigen::MatrixXd instruments;
};

[[nodiscard]] Residualized residualize(const Design& d);

/**
 * Closed-form CIV: residualize on [intercept, B, covariates] and apply the
 * 2SLS projection beta = (r_X' P_I r_X)^-1 r_X' P_I r_Y. Throws
 * CollinearInstrumentsError or Civ3FailureError on exact rank deficiency.
 */
[[nodiscard]] EstimateResult civ_estimate(const TimeSeriesDataset& ds, const EstimatorSpec& spec,
                                          const EstimateOptions& opts = {});
[[nodiscard]] EstimateResult civ_estimate(const Design& d, const EstimateOptions& opts = {},
                                          const std::string& label = {});

struct Civ3Check {
    double sigma_min = 0.0;
    double sigma_min_std = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// Smallest singular value of the conditional cross-covariance r_X' r_I / n.
[[nodiscard]] Civ3Check civ3_check(const Design& d, double tol = -1.0);
[[nodiscard]] Civ3Check civ3_check(const TimeSeriesDataset& ds, const EstimatorSpec& spec,
                                   double tol = -1.0, const DesignOptions& opts = {});

}  // namespace civ::estimation
