#include "civ/estimation/overlap.hpp"

#include <algorithm>
#include <stdexcept>

namespace civ::estimation {

bool intervals_overlap(double a_lo, double a_hi, double b_lo, double b_hi) noexcept {
    return a_lo <= b_hi && b_lo <= a_hi;
}

const ModelRejection& OverlapReport::rejection(const std::string& model) const {
    for (const auto& r : rejections) {
        if (r.model == model) return r;
    }
    throw std::out_of_range("overlap report: no model named '" + model + "'");
}

OverlapReport overlap_analysis(std::vector<EstimateResult> results,
                               const std::vector<ModelValidity>& validity) {
    if (results.size() < 2) throw std::invalid_argument("overlap analysis needs at least two estimates");
    OverlapReport report;
    const std::size_t k = results.size();
    report.pairwise_overlap.assign(k, std::vector<bool>(k, true));
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const bool o = intervals_overlap(results[a].lower(), results[a].upper(),
                                             results[b].lower(), results[b].upper());
            report.pairwise_overlap[a][b] = report.pairwise_overlap[b][a] = o;
        }
    }
    for (const auto& m : validity) {
        ModelRejection rej{m.model, false, {}};
        std::vector<std::size_t> members;
        for (std::size_t a = 0; a < k; ++a) {
            if (std::find(m.valid_labels.begin(), m.valid_labels.end(), results[a].label) !=
                m.valid_labels.end()) {
                members.push_back(a);
            }
        }
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                if (!report.pairwise_overlap[members[i]][members[j]]) {
                    rej.rejected = true;
                    rej.conflicts.emplace_back(results[members[i]].label, results[members[j]].label);
                }
            }
        }
        report.rejections.push_back(std::move(rej));
    }
    report.estimates = std::move(results);
    return report;
}

}  // namespace civ::estimation
