#include "civ/estimation/civ.hpp"

#include <cmath>

#include "civ/estimation/hac.hpp"

namespace civ::estimation {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kZ95 = 1.96;

Eigen::VectorXd column_sd(const Eigen::MatrixXd& m) {
    return (m.colwise().squaredNorm() / static_cast<double>(m.rows())).cwiseSqrt().transpose();
}

double default_civ3_tol(Eigen::Index p, Eigen::Index q, Eigen::Index n) {
    return 2.0 * (std::sqrt(static_cast<double>(p)) + std::sqrt(static_cast<double>(q))) /
           std::sqrt(static_cast<double>(n));
}

}  // namespace

Residualized residualize(const Design& d) {
    return {residualize(d.basis, d.y), residualize(d.basis, d.x),
            residualize(d.basis, d.instruments)};
}

namespace {

Civ3Check civ3_from(const Residualized& r, double tol) {
    const auto n = static_cast<double>(r.y.size());
    Civ3Check out;
    const Eigen::MatrixXd cross = r.x.transpose() * r.instruments / n;
    out.sigma_min = Eigen::JacobiSVD<Eigen::MatrixXd>(cross).singularValues().minCoeff();

    const Eigen::VectorXd sx = column_sd(r.x);
    const Eigen::VectorXd si = column_sd(r.instruments);
    if (sx.minCoeff() > 0.0 && si.minCoeff() > 0.0) {
        const Eigen::MatrixXd corr = sx.cwiseInverse().asDiagonal() * cross * si.cwiseInverse().asDiagonal();
        out.sigma_min_std = Eigen::JacobiSVD<Eigen::MatrixXd>(corr).singularValues().minCoeff();
    }
    out.tol = tol >= 0.0 ? tol : default_civ3_tol(r.x.cols(), r.instruments.cols(), r.x.rows());
    out.pass = out.sigma_min_std > out.tol;
    return out;
}

}  // namespace

Civ3Check civ3_check(const Design& d, double tol) { return civ3_from(residualize(d), tol); }

Civ3Check civ3_check(const TimeSeriesDataset& ds, const EstimatorSpec& spec, double tol,
                     const DesignOptions& opts) {
    return civ3_check(build_design(ds, spec, opts), tol);
}

EstimateResult civ_estimate(const Design& d, const EstimateOptions& opts, const std::string& label) {
    const Residualized r = residualize(d);
    const Eigen::Index n = r.x.rows();
    const Eigen::Index p = r.x.cols();
    const Eigen::Index q = r.instruments.cols();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> zqr(r.instruments);
    zqr.setThreshold(kRankTol);
    if (zqr.rank() < q) {
        throw CollinearInstrumentsError(
            "residualized instruments are collinear (rank " + std::to_string(zqr.rank()) + " of " +
            std::to_string(q) + "); drop redundant instruments or conditioning columns");
    }
    // First stage and projected regressors P_I r_X.
    const Eigen::MatrixXd pi = zqr.solve(r.x);
    const Eigen::MatrixXd x_hat = r.instruments * pi;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> xqr(x_hat);
    xqr.setThreshold(kRankTol);
    const Civ3Check rank = civ3_from(r, opts.civ3_tol);
    if (xqr.rank() < p) {
        throw Civ3FailureError("instruments do not identify all regressors: conditional "
                               "cross-covariance has rank " +
                               std::to_string(xqr.rank()) + " < " + std::to_string(p));
    }

    EstimateResult out;
    out.label = label;
    out.regressor_names = d.x_names;
    out.beta_hat = xqr.solve(r.y);
    const Eigen::VectorXd u = r.y - r.x * out.beta_hat;
    out.bandwidth = opts.bandwidth >= 0 ? opts.bandwidth : default_bandwidth(n);
    out.hac_cov = hac_cov(x_hat, u, out.bandwidth);
    out.se = out.hac_cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    out.ci.resize(p, 2);
    out.ci.col(0) = out.beta_hat - kZ95 * out.se;
    out.ci.col(1) = out.beta_hat + kZ95 * out.se;
    out.first_stage.pi = pi;
    out.first_stage.instrument_sd = column_sd(r.instruments);
    out.civ3_sigma_min = rank.sigma_min;
    out.civ3_sigma_min_std = rank.sigma_min_std;
    out.civ3_pass = rank.pass;
    out.n_used = d.n();
    out.dropped_covariates = d.dropped;
    return out;
}

EstimateResult civ_estimate(const TimeSeriesDataset& ds, const EstimatorSpec& spec,
                            const EstimateOptions& opts) {
    return civ_estimate(build_design(ds, spec, opts.design), opts, spec.label);
}

}  // namespace civ::estimation
