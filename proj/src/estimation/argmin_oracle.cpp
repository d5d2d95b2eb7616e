#include "civ/estimation/argmin_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace civ::estimation {

namespace {

struct Moments {
    Eigen::MatrixXd zx;   // r_I' r_X / n
    Eigen::VectorXd zy;   // r_I' r_Y / n
    Eigen::MatrixXd weight;
};

Eigen::MatrixXd partial_out(const Eigen::MatrixXd& c, const Eigen::MatrixXd& m) {
    if (c.cols() == 0) return m;
    const Eigen::MatrixXd coef = (c.transpose() * c).ldlt().solve(c.transpose() * m);
    return m - c * coef;
}

Moments moments(const Design& d) {
    const auto n = static_cast<double>(d.n());
    const Eigen::MatrixXd ry = partial_out(d.conditioning, d.y);
    const Eigen::MatrixXd rx = partial_out(d.conditioning, d.x);
    const Eigen::MatrixXd rz = partial_out(d.conditioning, d.instruments);
    Moments m;
    m.zx = rz.transpose() * rx / n;
    m.zy = rz.transpose() * ry.col(0) / n;
    const Eigen::MatrixXd zz = rz.transpose() * rz / n;
    m.weight = zz.ldlt().solve(Eigen::MatrixXd::Identity(zz.rows(), zz.cols()));
    return m;
}

double objective(const Moments& m, const Eigen::VectorXd& b) {
    const Eigen::VectorXd g = m.zy - m.zx * b;
    return g.dot(m.weight * g);
}

Eigen::VectorXd gradient(const Moments& m, const Eigen::VectorXd& b) {
    const Eigen::VectorXd g = m.zy - m.zx * b;
    return -2.0 * m.zx.transpose() * (m.weight * g);
}

}  // namespace

double civ_objective(const Design& d, const Eigen::VectorXd& b) { return objective(moments(d), b); }

ArgminResult numeric_argmin_oracle(const Design& d) {
    const Moments m = moments(d);
    const Eigen::Index p = m.zx.cols();

    // Work in coordinates c = b / scale so that every direction has comparable curvature.
    Eigen::VectorXd scale(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double s = m.zx.col(j).norm();
        if (s == 0.0) throw std::runtime_error("argmin oracle: regressor unrelated to instruments");
        scale(j) = 1.0 / s;
    }
    auto grad_c = [&](const Eigen::VectorXd& c) {
        return Eigen::VectorXd(gradient(m, scale.cwiseProduct(c)).cwiseProduct(scale));
    };

    Eigen::VectorXd c = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd g = grad_c(c);
    const double g0 = g.norm();
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(p, p);
    ArgminResult out;
    for (int it = 0; it < 500 && g.norm() > 1e-15 * g0; ++it) {
        Eigen::VectorXd dir = -h_inv * g;
        if (dir.dot(g) >= 0.0) {
            h_inv.setIdentity();
            dir = -g;
        }
        // The objective is a quadratic along any line, so its directional
        // derivative is linear: one secant step locates the line minimum.
        const double d0 = g.dot(dir);
        const double d1 = grad_c(c + dir).dot(dir);
        if (d1 == d0) break;
        const double alpha = d0 / (d0 - d1);
        const Eigen::VectorXd step = alpha * dir;
        const Eigen::VectorXd g_new = grad_c(c + step);
        const Eigen::VectorXd yk = g_new - g;
        const double sy = step.dot(yk);
        c += step;
        g = g_new;
        out.iterations = it + 1;
        if (sy <= 0.0) {
            h_inv.setIdentity();
            continue;
        }
        const double rho = 1.0 / sy;
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
        h_inv = (eye - rho * step * yk.transpose()) * h_inv * (eye - rho * yk * step.transpose()) +
                rho * step * step.transpose();
        if (step.norm() <= 1e-15 * std::max(1.0, c.norm())) break;
    }
    out.beta = scale.cwiseProduct(c);
    out.objective = objective(m, out.beta);
    return out;
}

ArgminResult numeric_argmin_oracle(const TimeSeriesDataset& ds, const EstimatorSpec& spec,
                                   const DesignOptions& opts) {
    return numeric_argmin_oracle(build_design(ds, spec, opts));
}

}  // namespace civ::estimation
