#include "civ/estimation/hac.hpp"

#include <cmath>
#include <stdexcept>

namespace civ::estimation {

int default_bandwidth(Eigen::Index n) {
    if (n <= 0) return 0;
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

Eigen::MatrixXd long_run_variance(const Eigen::MatrixXd& g, int bandwidth) {
    if (bandwidth < 0) throw std::invalid_argument("hac: bandwidth must be non-negative");
    const Eigen::Index n = g.rows();
    Eigen::MatrixXd s = g.transpose() * g;
    const Eigen::Index max_lag = std::min<Eigen::Index>(bandwidth, n - 1);
    for (Eigen::Index l = 1; l <= max_lag; ++l) {
        const double w = 1.0 - static_cast<double>(l) / (bandwidth + 1.0);
        Eigen::MatrixXd gamma = g.bottomRows(n - l).transpose() * g.topRows(n - l);
        s += w * (gamma + gamma.transpose());
    }
    return s;
}

Eigen::MatrixXd hac_cov(const Eigen::MatrixXd& moment_matrix, const Eigen::VectorXd& residuals,
                        int bandwidth) {
    if (moment_matrix.rows() != residuals.size()) {
        throw std::invalid_argument("hac: moment matrix and residuals differ in length");
    }
    const Eigen::MatrixXd g = moment_matrix.array().colwise() * residuals.array();
    const Eigen::MatrixXd bread =
        (moment_matrix.transpose() * moment_matrix).ldlt().solve(
            Eigen::MatrixXd::Identity(moment_matrix.cols(), moment_matrix.cols()));
    Eigen::MatrixXd v = bread * long_run_variance(g, bandwidth) * bread;
    return 0.5 * (v + v.transpose());
}

Eigen::MatrixXd classical_cov(const Eigen::MatrixXd& moment_matrix,
                              const Eigen::VectorXd& residuals) {
    const double sigma2 = residuals.squaredNorm() / static_cast<double>(residuals.size());
    return sigma2 * (moment_matrix.transpose() * moment_matrix)
                        .ldlt()
                        .solve(Eigen::MatrixXd::Identity(moment_matrix.cols(), moment_matrix.cols()));
}

}  // namespace civ::estimation
