#include "civ/estimator_spec.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace civ {

std::string to_string(const LaggedRef& ref) {
    return ref.component + "@" + std::to_string(-ref.lag);
}

LaggedRef parse_lagged_ref(const std::string& text) {
    auto fail = [&] { throw std::invalid_argument("cannot parse lagged reference '" + text + "'"); };
    if (text.empty()) fail();
    LaggedRef ref;
    std::string offset;
    if (auto at = text.find('@'); at != std::string::npos) {
        ref.component = text.substr(0, at);
        offset = text.substr(at + 1);
    } else if (auto br = text.find('['); br != std::string::npos) {
        if (text.back() != ']') fail();
        ref.component = text.substr(0, br);
        offset = text.substr(br + 1, text.size() - br - 2);
    } else {
        ref.component = text;
        offset = "0";
    }
    if (ref.component.empty()) fail();
    std::size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(offset, &used);
    } catch (const std::exception&) {
        fail();
    }
    if (used != offset.size()) fail();
    if (value > 0) throw std::invalid_argument("reference '" + text + "' points into the future");
    ref.lag = -value;
    return ref;
}

int EstimatorSpec::max_lag() const noexcept {
    int m = outcome.lag;
    for (const auto* group : {&instruments, &regressors, &conditioning}) {
        for (const auto& r : *group) m = std::max(m, r.lag);
    }
    return m;
}

std::vector<LaggedRef> EstimatorSpec::all_refs() const {
    std::vector<LaggedRef> out;
    out.insert(out.end(), instruments.begin(), instruments.end());
    out.insert(out.end(), regressors.begin(), regressors.end());
    out.insert(out.end(), conditioning.begin(), conditioning.end());
    out.push_back(outcome);
    return out;
}

void EstimatorSpec::validate() const {
    if (regressors.empty()) throw std::invalid_argument("estimator: no regressors");
    if (instruments.size() < regressors.size()) {
        throw std::invalid_argument("estimator: fewer instruments than regressors");
    }
    std::set<LaggedRef> seen;
    for (const auto& r : all_refs()) {
        if (r.lag < 0) throw std::invalid_argument("estimator: negative lag");
        if (!seen.insert(r).second) {
            throw std::invalid_argument("estimator: " + to_string(r) +
                                        " appears in more than one role");
        }
    }
}

}  // namespace civ
