#include "civ/dataset/fixture.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "civ/dataset/market_csv.hpp"
#include "civ/scm/model.hpp"

namespace civ::dataset {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double holiday_fraction(unsigned month, unsigned day) {
    // Country-wide days, then a few regional ones.
    if ((month == 1 && day == 1) || (month == 5 && day == 1) || (month == 10 && day == 3) ||
        (month == 12 && (day == 25 || day == 26))) {
        return 1.0;
    }
    if (month == 1 && day == 6) return 0.3;
    if (month == 11 && day == 1) return 0.644;
    if (month == 8 && day == 15) return 0.1;
    return 0.0;
}

}  // namespace

TimeSeriesDataset generate_fixture(const FixtureConfig& cfg) {
    if (cfg.years < 1) throw std::invalid_argument("fixture: at least one year");
    const CivilHour start{cfg.start_year, 1, 1, 0};
    const std::int64_t h0 = start.index();
    const std::int64_t h1 = CivilHour{cfg.start_year + cfg.years, 1, 1, 0}.index();
    const auto T = static_cast<std::size_t>(h1 - h0);

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    // Exogenous inputs first; their draws come from the same stream, in time order.
    std::vector<double> solar(T), gas(T, kNaN), heat(T, kNaN), cool(T, kNaN), hol(T, kNaN), school(T, kNaN);
    std::vector<double> demand_shift(T), supply_shift(T);
    std::vector<std::string> stamps(T);
    double temp_anom = 0.0, gas_level = 20.0, cloud = 0.7;
    double g = gas_level, hd = 0.0, cd = 0.0, hf = 0.0, sf = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const auto c = CivilHour::from_index(h0 + static_cast<std::int64_t>(t));
        stamps[t] = c.str();
        const double season = std::cos(2.0 * std::numbers::pi * (c.month - 1) / 12.0);  // +1 winter
        if (c.hour == 0) {
            temp_anom = 0.8 * temp_anom + 2.0 * z(rng);
            const double temp = 10.0 - 9.0 * season + temp_anom;
            hd = std::max(0.0, 15.0 - temp);
            cd = std::max(0.0, temp - 22.0);
            gas_level = 20.0 + 0.97 * (gas_level - 20.0) + 0.8 * z(rng);
            g = gas_level;
            cloud = 0.3 + 0.7 * u(rng);
            hf = holiday_fraction(c.month, c.day);
            sf = (c.month == 8 || (c.month == 7 && c.day > 20)) ? 0.6 : 0.0;
            gas[t] = g;
            heat[t] = hd;
            cool[t] = cd;
            hol[t] = hf;
            school[t] = sf;
        }
        const double daylight = std::max(0.0, std::sin(std::numbers::pi * (static_cast<double>(c.hour) - 6.0) / 12.0));
        solar[t] = daylight * (6000.0 - 3000.0 * season) * cloud;

        const bool weekend = c.weekday() >= 5;
        const double profile = 7000.0 * std::max(0.0, std::sin(std::numbers::pi * (static_cast<double>(c.hour) - 5.0) / 16.0));
        demand_shift[t] = profile - (weekend ? 6000.0 : 0.0) + 2500.0 * season + 150.0 * hd + 120.0 * cd -
                          6000.0 * hf - 1500.0 * sf;
        supply_shift[t] = solar[t] - 150.0 * (g - 20.0);
    }
    // Centre the shifters so the intercepts keep their usual meaning.
    auto centre = [](std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        for (double& x : v) x -= m;
    };
    centre(demand_shift);
    centre(supply_shift);

    scm::ModelParams p = scm::default_params(scm::ModelKind::InertialDemand);
    p.beta_P = cfg.beta_P;
    p.beta_D1 = cfg.beta_D1;
    p.wind_ar = {cfg.wind_ar};
    p = scm::with_intercept(scm::ModelKind::InertialDemand, p, 60'000.0);
    scm::validate(scm::ModelKind::InertialDemand, p);
    const auto means = scm::stationary_means(scm::ModelKind::InertialDemand, p);

    std::vector<double> W(T), P(T), D(T);
    double w = p.wind_mean, d_prev = means.demand;
    const double denom = p.beta_P - p.gamma_P;
    const long burn = 2'000;
    for (long step = -burn; step < static_cast<long>(T); ++step) {
        const double e_w = p.sigma_W * z(rng);
        const double e_s = p.sigma_S * z(rng);
        const double e_d = p.sigma_D * z(rng);
        w = p.wind_mean * (1.0 - cfg.wind_ar) + cfg.wind_ar * w + e_w;
        const auto t = static_cast<std::size_t>(std::max(step, 0L));
        const double xs = step < 0 ? 0.0 : demand_shift[t];
        const double ss = step < 0 ? 0.0 : supply_shift[t];
        const double base = p.D_0 + xs + p.beta_D1 * d_prev + e_d;
        const double price = (p.S_0 + ss + p.gamma_W * w + e_s - base) / denom;
        const double demand = base + p.beta_P * price;
        d_prev = demand;
        if (step < 0) continue;
        W[t] = w;
        P[t] = price;
        D[t] = demand;
    }

    std::vector<std::int64_t> hours(T);
    for (std::size_t t = 0; t < T; ++t) hours[t] = h0 + static_cast<std::int64_t>(t);
    return TimeSeriesDataset({"D", "P", "W", "solar", "gas", "heating_degrees", "cooling_degrees",
                              "holiday_fraction", "school_holiday_fraction"},
                             {D, P, W, solar, gas, heat, cool, hol, school}, std::move(hours),
                             std::move(stamps));
}

nlohmann::json summary_statistics(const TimeSeriesDataset& ds, const std::vector<std::string>& columns) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& name : columns) {
        const auto col = ds.column(name);
        double sum = 0.0, sq = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
        std::size_t n = 0;
        for (double v : col) {
            if (!std::isfinite(v)) continue;
            ++n;
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double mean = n ? sum / static_cast<double>(n) : kNaN;
        for (double v : col) {
            if (std::isfinite(v)) sq += (v - mean) * (v - mean);
        }
        out[name] = {{"count", n},
                     {"mean", mean},
                     {"sd", n > 1 ? std::sqrt(sq / static_cast<double>(n - 1)) : kNaN},
                     {"min", lo},
                     {"max", hi}};
    }
    return out;
}

}  // namespace civ::dataset
