#include "bucksim/sde_engine.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bucksim/errors.hpp"
#include "bucksim/rng.hpp"

namespace bucksim {

OuIncrement OuIncrement::make(const ConverterParams& p, double h, double eps) {
    const double a = p.alpha_on;
    // -expm1(-2ah) keeps the variance accurate for tiny steps.
    return {std::exp(-a * h), eps * std::sqrt(-std::expm1(-2.0 * a * h) / (2.0 * a))};
}

double ou_step(const ConverterParams& p, double x, double h, double eps, double gauss) {
    const auto inc = OuIncrement::make(p, h, eps);
    const double eq = p.on_equilibrium();
    return eq + (x - eq) * inc.mean_coef + inc.sd * gauss;
}

double crossing_probability(double x1, double x2, double level, double h, double eps) {
    if (x1 > level || x2 > level) {
        throw DomainError("crossing_probability: an endpoint is above the level; treat the step as a crossing");
    }
    const double gap = (level - x1) * (level - x2);
    if (gap == 0.0) return 1.0;
    if (eps == 0.0) return 0.0;
    return std::exp(-2.0 * gap / (eps * eps * h));
}

double time_change(const ConverterParams& p, double t) {
    return std::expm1(2.0 * p.alpha_on * t) / (2.0 * p.alpha_on);
}

double inverse_time_change(const ConverterParams& p, double s) {
    return std::log1p(2.0 * p.alpha_on * s) / (2.0 * p.alpha_on);
}

long steps_per_unit(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError(fmt::format("dt must be > 0 (got {})", dt));
    const double inv = 1.0 / dt;
    const double n = std::round(inv);
    if (n < 1.0 || std::abs(inv - n) > 1e-9 * n) {
        throw ConfigError(fmt::format("1/dt must be an integer (dt = {})", dt));
    }
    return static_cast<long>(n);
}

StochPath::StochPath(ConverterParams p, long steps_per_unit, Schedule schedule, std::vector<double> grid_x,
                     std::vector<int> grid_y, std::uint64_t replica_seed, double lipschitz)
    : p_(p),
      n_(steps_per_unit),
      schedule_(std::move(schedule)),
      grid_x_(std::move(grid_x)),
      grid_y_(std::move(grid_y)),
      seed_(replica_seed),
      lipschitz_(lipschitz) {}

HybridState StochPath::at(double t) const {
    const auto& cycles = schedule_.cycles;
    auto it = std::upper_bound(cycles.begin(), cycles.end(), t,
                               [](double v, const Cycle& c) { return v < c.on_start; });
    if (it == cycles.begin()) {
        // Only possible at t == horizon == 0 or before the first cycle.
        return {grid_x_.front(), grid_y_.front()};
    }
    --it;
    if (it->next_on && t >= *it->next_on) {
        // Clock pulse exactly at the horizon: ON, no further cycle recorded.
        return {grid_x_.back(), 1};
    }
    if (it->off_time && t >= *it->off_time) {
        return {p_.x_ref * std::exp(-p_.alpha_off * (t - *it->off_time)), 0};
    }

    const double nd = static_cast<double>(n_);
    const auto last = static_cast<long>(grid_x_.size()) - 1;
    long k = std::clamp(static_cast<long>(std::floor(t * nd)), 0L, last);
    if (static_cast<double>(k) / nd > t && k > 0) --k;
    if (k < last && static_cast<double>(k + 1) / nd <= t) ++k;
    const double t0 = static_cast<double>(k) / nd;
    if (t == t0 || k == last) return {grid_x_[k], 1};

    double t1 = static_cast<double>(k + 1) / nd;
    double x1 = grid_x_[k + 1];
    if (it->off_time && t1 >= *it->off_time) {
        t1 = *it->off_time;
        x1 = p_.x_ref;
    }
    const double w = (t - t0) / (t1 - t0);
    return {grid_x_[k] + w * (x1 - grid_x_[k]), 1};
}

std::size_t StochPath::slow_passages() const {
    std::size_t count = 0;
    for (const auto& c : schedule_.cycles) {
        if (c.next_on && *c.next_on - c.on_start > 1.0) ++count;
        else if (!c.next_on && c.off_time && *c.off_time - c.on_start > 1.0) ++count;
    }
    return count;
}

StochPath simulate_stoch(const ConverterParams& p, HybridState z0, const StochConfig& cfg, std::uint64_t replica) {
    if (z0.y != 1) throw DomainError("stochastic paths start in the ON mode");
    if (!(z0.x > 0.0 && z0.x < p.x_ref)) {
        throw DomainError(fmt::format("initial state {} outside (0, x_ref = {})", z0.x, p.x_ref));
    }
    if (cfg.horizon < 0) throw ConfigError("horizon must be non-negative");
    if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon)) throw ConfigError("epsilon must be >= 0");

    const long n = steps_per_unit(cfg.dt);
    const double nd = static_cast<double>(n);
    const double h = 1.0 / nd;
    const long total = n * cfg.horizon;
    const double eq = p.on_equilibrium();
    const double level = p.x_ref;
    const auto inc = OuIncrement::make(p, h, cfg.epsilon);
    const bool bridge = cfg.bridge_correction && cfg.epsilon > 0.0;

    const std::uint64_t seed = stream_seed(cfg.seed, replica);
    Engine engine(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;

    Schedule schedule;
    schedule.horizon = cfg.horizon;
    std::vector<double> gx(static_cast<std::size_t>(total + 1));
    std::vector<int> gy(static_cast<std::size_t>(total + 1));
    double lipschitz = p.alpha_off * p.x_ref;

    long k = 0;
    double x = z0.x;
    for (;;) {
        gx[k] = x;
        gy[k] = 1;
        if (k == total) break;

        // ON phase from the clock pulse at node k.
        Cycle cycle;
        cycle.on_start = static_cast<double>(k) / nd;
        double tau = 0.0;
        bool crossed = false;
        while (k < total) {
            const double xn = eq + (x - eq) * inc.mean_coef + inc.sd * normal(engine);
            const double t_prev = static_cast<double>(k) / nd;
            if (xn >= level) {
                tau = t_prev + h * (level - x) / (xn - x);
                crossed = true;
            } else if (bridge && uniform(engine) < crossing_probability(x, xn, level, h, cfg.epsilon)) {
                tau = t_prev + 0.5 * h;
                crossed = true;
            }
            ++k;
            if (crossed) {
                lipschitz = std::max(lipschitz, std::abs(level - x) / (tau - t_prev));
                break;
            }
            lipschitz = std::max(lipschitz, std::abs(xn - x) * nd);
            x = xn;
            gx[k] = x;
            gy[k] = 1;
        }
        if (!crossed) {
            schedule.cycles.push_back(cycle);
            break;
        }

        // OFF phase in closed form until the next clock pulse strictly after tau.
        cycle.off_time = tau;
        const double sigma = std::floor(tau) + 1.0;
        const long sigma_node = static_cast<long>(sigma) * n;
        const long fill_end = std::min(sigma_node, total);
        for (long j = k; j <= fill_end; ++j) {
            gx[j] = level * std::exp(-p.alpha_off * (static_cast<double>(j) / nd - tau));
            gy[j] = 0;
        }
        if (sigma_node > total) {
            schedule.cycles.push_back(cycle);
            break;
        }
        cycle.next_on = sigma;
        schedule.cycles.push_back(cycle);
        x = level * std::exp(-p.alpha_off * (sigma - tau));
        k = sigma_node;
    }

    return StochPath(p, n, std::move(schedule), std::move(gx), std::move(gy), seed, lipschitz);
}

} // namespace bucksim
