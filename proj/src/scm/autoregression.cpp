#include "civ/scm/autoregression.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace civ::scm {

double ar_spectral_radius(std::span<const double> phi) {
    const auto p = static_cast<Eigen::Index>(phi.size());
    if (p == 0) return 0.0;
    if (p == 1) return std::abs(phi[0]);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index k = 0; k < p; ++k) companion(0, k) = phi[static_cast<std::size_t>(k)];
    for (Eigen::Index k = 1; k < p; ++k) companion(k, k - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

ArFit fit_ar(std::span<const double> x, int order) {
    if (order < 0) throw std::invalid_argument("fit_ar: negative order");
    const auto n = static_cast<Eigen::Index>(x.size());
    if (order >= n) throw std::invalid_argument("fit_ar: order must be below the series length");

    ArFit fit;
    if (order == 0) {
        double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        fit.intercept = mean;
        fit.residual_sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
        return fit;
    }
    const Eigen::Index rows = n - order;
    if (rows <= order + 1) throw std::invalid_argument("fit_ar: series too short for the order");
    Eigen::MatrixXd design(rows, order + 1);
    Eigen::VectorXd target(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto t = static_cast<std::size_t>(r + order);
        target(r) = x[t];
        design(r, 0) = 1.0;
        for (int k = 1; k <= order; ++k) design(r, k) = x[t - static_cast<std::size_t>(k)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < order + 1) throw std::invalid_argument("fit_ar: singular lag design");
    Eigen::VectorXd coef = qr.solve(target);
    Eigen::VectorXd resid = target - design * coef;
    fit.intercept = coef(0);
    fit.coefficients.assign(coef.data() + 1, coef.data() + coef.size());
    fit.residual_sd = std::sqrt(resid.squaredNorm() / static_cast<double>(rows - order - 1));
    return fit;
}

double observed_autocorrelation(std::span<const double> x, int lag) {
    if (lag < 0) throw std::invalid_argument("autocorrelation: negative lag");
    if (x.size() <= static_cast<std::size_t>(lag)) {
        throw std::invalid_argument("autocorrelation: series not longer than the lag");
    }
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    if (denom <= 0.0) throw std::invalid_argument("autocorrelation: constant series");
    double num = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(lag) < x.size(); ++t) {
        num += (x[t] - mean) * (x[t + static_cast<std::size_t>(lag)] - mean);
    }
    return num / denom;
}

}  // namespace civ::scm
