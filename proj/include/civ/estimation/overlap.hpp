#pragma once

#include <string>
#include <utility>
#include <vector>

#include "civ/estimation/civ.hpp"

namespace civ::estimation {

/// Labels of the estimators that a candidate model declares valid ex ante.
struct ModelValidity {
    std::string model;
    std::vector<std::string> valid_labels;
};

struct ModelRejection {
    std::string model;
    bool rejected = false;
    /// Non-overlapping pairs among the model's valid estimators.
    std::vector<std::pair<std::string, std::string>> conflicts;
};

struct OverlapReport {
    std::vector<EstimateResult> estimates;
    std::vector<std::vector<bool>> pairwise_overlap;
    std::vector<ModelRejection> rejections;

    [[nodiscard]] const ModelRejection& rejection(const std::string& model) const;
};

/// Closed intervals [a_lo, a_hi] and [b_lo, b_hi] intersect.
[[nodiscard]] bool intervals_overlap(double a_lo, double a_hi, double b_lo, double b_hi) noexcept;

/**
 * Compares the 95% intervals of the effect of interest pairwise. A model is
 * rejected when two of its ex-ante-valid estimators have disjoint intervals.
 * Labels a model lists but the estimates lack are ignored. Requires >= 2 results.
 */
[[nodiscard]] OverlapReport overlap_analysis(std::vector<EstimateResult> results,
                                             const std::vector<ModelValidity>& validity);

}  // namespace civ::estimation
