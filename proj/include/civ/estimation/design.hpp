#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "civ/estimator_spec.hpp"
#include "civ/timeseries.hpp"

namespace civ::estimation {

struct DesignOptions {
    bool intercept = true;
    /// Extra contemporaneous columns added to the conditioning stage (application mode).
    std::vector<std::string> covariates;
    /// Relative tolerance below which a conditioning column counts as collinear.
    double collinearity_tol = 1e-10;
};

/**
 * Aligned regression matrices for one estimator. Row r of every matrix refers
 * to dataset row rows[r]; lagged refs are resolved through materialized lag
 * columns or the hour index (see TimeSeriesDataset::lagged).
 *
 * `conditioning` holds intercept, B and covariates after collinear columns
 * were removed; `basis` is an orthonormal basis of its column space.
 */
struct Design {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;
    Eigen::MatrixXd instruments;
    Eigen::MatrixXd conditioning;
    Eigen::MatrixXd basis;
    std::vector<std::size_t> rows;
    std::vector<std::string> x_names, instrument_names, conditioning_names;
    std::vector<std::string> dropped;

    [[nodiscard]] std::size_t n() const noexcept { return rows.size(); }
};

/// Throws std::invalid_argument for missing columns or when no complete row remains.
[[nodiscard]] Design build_design(const TimeSeriesDataset& ds, const EstimatorSpec& spec,
                                  const DesignOptions& opts = {});

/// m minus its projection on span(basis); basis must have orthonormal columns.
[[nodiscard]] Eigen::MatrixXd residualize(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& m);

}  // namespace civ::estimation
