#include "civ/scm/simulate.hpp"

#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace civ::scm {

namespace {

// Ring of the most recent wind values, newest first.
class WindProcess {
public:
    WindProcess(const ModelParams& p)
        : phi_(p.wind_ar), history_(p.wind_ar.size(), p.wind_mean), sigma_(p.sigma_W) {
        const double phi_sum = std::accumulate(phi_.begin(), phi_.end(), 0.0);
        constant_ = p.wind_mean * (1.0 - phi_sum);
    }

    double step(double shock) {
        double w = constant_ + shock;
        for (std::size_t k = 0; k < phi_.size(); ++k) w += phi_[k] * history_[k];
        if (!history_.empty()) {
            history_.pop_back();
            history_.push_front(w);
        }
        return w;
    }

    double sigma() const { return sigma_; }

private:
    std::vector<double> phi_;
    std::deque<double> history_;
    double constant_ = 0.0;
    double sigma_;
};

}  // namespace

Simulation simulate(const SimulatorSpec& spec, const SimulationConfig& cfg) {
    const ModelKind kind = base_structure(spec.structure);
    const ModelParams& p = spec.params;
    validate(kind, p);
    if (cfg.T < 1) throw std::invalid_argument("simulate: T must be at least 1");
    const double rho = persistence(kind, p);
    // Memory of the slowest root: burn-in must cover ten times 1/(1 - rho).
    const double memory = rho > 0.0 ? 1.0 / (1.0 - rho) : 1.0;
    if (static_cast<double>(cfg.burn_in) < 10.0 * memory) {
        throw std::invalid_argument("simulate: burn_in " + std::to_string(cfg.burn_in) +
                                    " is below ten times the process memory (" +
                                    std::to_string(10.0 * memory) + ")");
    }

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw = [&](double sigma) { return sigma * normal(rng); };

    const bool model2 = kind == ModelKind::HeterogeneousDemand;
    const auto means = stationary_means(kind, p);
    WindProcess wind(p);
    double prev_d = means.demand;
    double prev_p = means.price;
    double prev_b = model2 ? p.B_0 / (1.0 - p.beta_B1) : 0.0;
    const double denom = p.beta_P - p.gamma_P;

    const auto T = static_cast<std::size_t>(cfg.T);
    std::vector<double> W(T), P(T), D(T), A, B;
    std::vector<double> uW(T), uS(T), uD(T), uA, uB;
    if (model2) {
        A.resize(T);
        B.resize(T);
        uA.resize(T);
        uB.resize(T);
    }

    const long total = static_cast<long>(cfg.burn_in) + cfg.T;
    for (long step = 0; step < total; ++step) {
        const double e_w = draw(wind.sigma());
        const double e_s = draw(p.sigma_S);
        double e_d = 0.0, e_a = 0.0, e_b = 0.0;
        if (model2) {
            e_a = draw(p.sigma_A);
            e_b = draw(p.sigma_B);
        } else {
            e_d = draw(p.sigma_D);
        }

        const double w = wind.step(e_w);
        const double supply_part = p.S_0 + p.gamma_W * w + e_s;
        double price = 0.0, demand = 0.0, a = 0.0, b = 0.0;
        switch (kind) {
            case ModelKind::InertialDemand: {
                const double base = p.D_0 + p.beta_D1 * prev_d + e_d;
                price = (supply_part - base) / denom;
                demand = base + p.beta_P * price;
                break;
            }
            case ModelKind::HeterogeneousDemand: {
                b = p.B_0 + p.beta_B1 * prev_b + e_b;
                const double base = p.A_0 + b + e_a;
                price = (supply_part - base) / denom;
                a = p.A_0 + p.beta_P * price + e_a;
                demand = a + b;
                break;
            }
            default: {
                const double base = p.D_0 + p.beta_P1 * prev_p + e_d;
                price = (supply_part - base) / denom;
                demand = base + p.beta_P * price;
                break;
            }
        }
        prev_d = demand;
        prev_p = price;
        prev_b = b;

        if (step < cfg.burn_in) continue;
        const auto t = static_cast<std::size_t>(step - cfg.burn_in);
        W[t] = w;
        P[t] = price;
        D[t] = demand;
        uW[t] = e_w;
        uS[t] = e_s;
        if (model2) {
            A[t] = a;
            B[t] = b;
            uA[t] = e_a;
            uB[t] = e_b;
            uD[t] = e_a + e_b;
        } else {
            uD[t] = e_d;
        }
    }

    std::vector<std::string> names{"W", "P", "D"};
    std::vector<std::vector<double>> cols{std::move(W), std::move(P), std::move(D)};
    if (model2 && cfg.keep_latent) {
        names.insert(names.end(), {"A", "B"});
        cols.push_back(A);
        cols.push_back(B);
    }
    std::vector<std::string> shock_names{"U_W", "U_S", "U_D"};
    std::vector<std::vector<double>> shock_cols{std::move(uW), std::move(uS), std::move(uD)};
    if (model2) {
        shock_names.insert(shock_names.end(), {"U_A", "U_B"});
        shock_cols.push_back(std::move(uA));
        shock_cols.push_back(std::move(uB));
    }
    return {TimeSeriesDataset(std::move(names), std::move(cols)),
            TimeSeriesDataset(std::move(shock_names), std::move(shock_cols))};
}

}  // namespace civ::scm
