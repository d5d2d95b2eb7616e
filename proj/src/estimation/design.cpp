#include "civ/estimation/design.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace civ::estimation {

namespace {

// Where the value of one lagged reference comes from. A materialized lag
// column is read at the same row; otherwise the base column is read `lag`
// rows back after checking that the hour index lines up.
struct Source {
    std::span<const double> values;
    int shift = 0;
};

Source resolve(const TimeSeriesDataset& ds, const LaggedRef& ref) {
    if (ref.lag > 0) {
        if (auto j = ds.index_of(lag_column_name(ref.component, ref.lag))) {
            return {ds.column(*j), 0};
        }
    }
    auto j = ds.index_of(ref.component);
    if (!j) throw std::invalid_argument("design: dataset has no column '" + ref.component + "'");
    return {ds.column(*j), ref.lag};
}

std::optional<double> read(const TimeSeriesDataset& ds, const Source& s, std::size_t row) {
    if (s.shift == 0) return s.values[row];
    if (row < static_cast<std::size_t>(s.shift)) return std::nullopt;
    const std::size_t src = row - static_cast<std::size_t>(s.shift);
    if (ds.hours()[src] != ds.hours()[row] - s.shift) return std::nullopt;
    return s.values[src];
}

// Fill `out` column-by-column from `sources`, using only rows in `rows`.
Eigen::MatrixXd gather(const TimeSeriesDataset& ds, const std::vector<Source>& sources,
                       const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(sources.size()));
    for (std::size_t c = 0; c < sources.size(); ++c) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                *read(ds, sources[c], rows[r]);
        }
    }
    return out;
}

}  // namespace

Eigen::MatrixXd residualize(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& m) {
    if (basis.cols() == 0) return m;
    return m - basis * (basis.transpose() * m);
}

Design build_design(const TimeSeriesDataset& ds, const EstimatorSpec& spec,
                    const DesignOptions& opts) {
    spec.validate();

    std::vector<Source> y_src{resolve(ds, spec.outcome)};
    std::vector<Source> x_src, i_src, b_src;
    Design d;
    for (const auto& r : spec.regressors) {
        x_src.push_back(resolve(ds, r));
        d.x_names.push_back(to_string(r));
    }
    for (const auto& r : spec.instruments) {
        i_src.push_back(resolve(ds, r));
        d.instrument_names.push_back(to_string(r));
    }
    std::vector<std::string> b_names;
    for (const auto& r : spec.conditioning) {
        b_src.push_back(resolve(ds, r));
        b_names.push_back(to_string(r));
    }
    for (const auto& c : opts.covariates) {
        b_src.push_back(resolve(ds, {c, 0}));
        b_names.push_back(c);
    }

    // A row is used when every reference resolves to a finite value.
    auto usable = [&](const std::vector<Source>& src, std::size_t row) {
        for (const auto& s : src) {
            auto v = read(ds, s, row);
            if (!v || !std::isfinite(*v)) return false;
        }
        return true;
    };
    for (std::size_t row = 0; row < ds.rows(); ++row) {
        if (usable(y_src, row) && usable(x_src, row) && usable(i_src, row) && usable(b_src, row)) {
            d.rows.push_back(row);
        }
    }
    const std::size_t width = x_src.size() + b_src.size() + (opts.intercept ? 1 : 0);
    if (d.rows.size() <= width) {
        throw std::invalid_argument("design: only " + std::to_string(d.rows.size()) +
                                    " complete rows for " + std::to_string(width) +
                                    " columns (max lag " + std::to_string(spec.max_lag()) +
                                    ", dataset length " + std::to_string(ds.rows()) + ")");
    }

    d.y = gather(ds, y_src, d.rows).col(0);
    d.x = gather(ds, x_src, d.rows);
    d.instruments = gather(ds, i_src, d.rows);
    Eigen::MatrixXd b_raw = gather(ds, b_src, d.rows);

    const auto n = static_cast<Eigen::Index>(d.rows.size());
    std::vector<Eigen::VectorXd> candidates;
    std::vector<std::string> candidate_names;
    if (opts.intercept) {
        candidates.push_back(Eigen::VectorXd::Ones(n));
        candidate_names.emplace_back("(intercept)");
    }
    for (Eigen::Index c = 0; c < b_raw.cols(); ++c) {
        candidates.push_back(b_raw.col(c));
        candidate_names.push_back(b_names[static_cast<std::size_t>(c)]);
    }

    // Column-order elimination: in an unpivoted QR, |R_jj| is the norm of
    // column j after projecting out the columns before it. The first column
    // whose |R_jj| is tiny relative to its own norm is dropped and the
    // factorization repeated, so every decision sees only kept columns.
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (candidates[c].norm() == 0.0) {
            d.dropped.push_back(candidate_names[c]);
        } else {
            kept.push_back(c);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr;
    for (;;) {
        d.conditioning.resize(n, static_cast<Eigen::Index>(kept.size()));
        for (std::size_t k = 0; k < kept.size(); ++k) {
            d.conditioning.col(static_cast<Eigen::Index>(k)) = candidates[kept[k]];
        }
        if (kept.empty()) break;
        qr.compute(d.conditioning);
        const auto& r = qr.matrixQR();
        auto bad = kept.size();
        for (std::size_t k = 0; k < kept.size(); ++k) {
            const auto j = static_cast<Eigen::Index>(k);
            if (std::abs(r(j, j)) <= opts.collinearity_tol * candidates[kept[k]].norm()) {
                bad = k;
                break;
            }
        }
        if (bad == kept.size()) break;
        d.dropped.push_back(candidate_names[kept[bad]]);
        kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(bad));
    }
    for (auto k : kept) d.conditioning_names.push_back(candidate_names[k]);
    const auto k = static_cast<Eigen::Index>(kept.size());
    d.basis = k == 0 ? Eigen::MatrixXd(n, 0)
                     : Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(n, k));
    return d;
}

}  // namespace civ::estimation
