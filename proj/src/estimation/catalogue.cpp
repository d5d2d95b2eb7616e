#include "civ/estimation/catalogue.hpp"

#include <stdexcept>

namespace civ::estimation {

namespace {

std::vector<LaggedRef> lags(const std::string& name, int from, int to) {
    std::vector<LaggedRef> out;
    for (int s = from; s <= to; ++s) out.push_back({name, s});
    return out;
}

}  // namespace

EstimatorSpec catalogue(int number, int lag_depth, const CatalogueNames& n) {
    if (lag_depth < 1) throw std::invalid_argument("catalogue: L must be at least 1");
    const LaggedRef w0{n.instrument, 0};
    const LaggedRef p0{n.price, 0};
    const LaggedRef p1{n.price, 1};
    const LaggedRef d1{n.demand, 1};

    EstimatorSpec s;
    s.outcome = {n.demand, 0};
    s.label = "#" + std::to_string(number);
    s.lag_depth = lag_depth;
    switch (number) {
        case 1:
            s.instruments = {w0};
            s.regressors = {p0};
            s.lag_depth = 0;
            break;
        case 2:
            s.instruments = {w0};
            s.regressors = {p0};
            s.conditioning = lags(n.instrument, 1, lag_depth);
            break;
        case 3:
            s.instruments = {w0};
            s.regressors = {p0};
            s.conditioning = {d1};
            s.lag_depth = 0;
            break;
        case 4:
            s.instruments = {w0};
            s.regressors = {p0};
            for (int k = 1; k <= lag_depth; ++k) {
                s.conditioning.push_back({n.instrument, k});
                s.conditioning.push_back({n.price, k});
                s.conditioning.push_back({n.demand, k});
            }
            break;
        case 5:
            s.instruments = lags(n.instrument, 0, lag_depth);
            s.regressors = {p0, d1};
            break;
        case 6:
            s.instruments = lags(n.instrument, 0, lag_depth);
            s.regressors = {p0, p1};
            break;
        case 7:
            s.instruments = lags(n.instrument, 0, lag_depth);
            s.regressors = {p0, p1};
            s.conditioning = {d1};
            break;
        case 8:
            s.instruments = lags(n.instrument, 0, lag_depth);
            s.regressors = {p0, p1, d1};
            break;
        default:
            throw std::invalid_argument("catalogue: unknown estimator #" + std::to_string(number));
    }
    return s;
}

EstimatorSpec catalogue(const std::string& label, int lag_depth, const CatalogueNames& names) {
    std::string digits = label;
    if (!digits.empty() && digits.front() == '#') digits.erase(0, 1);
    int number = 0;
    std::size_t used = 0;
    try {
        number = std::stoi(digits, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("catalogue: unknown estimator '" + label + "'");
    }
    if (used != digits.size()) throw std::invalid_argument("catalogue: unknown estimator '" + label + "'");
    return catalogue(number, lag_depth, names);
}

std::vector<std::string> catalogue_labels() {
    return {"#1", "#2", "#3", "#4", "#5", "#6", "#7", "#8"};
}

}  // namespace civ::estimation
