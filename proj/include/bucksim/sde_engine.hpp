#pragma once

#include <cstdint>
#include <vector>

#include "bucksim/hybrid.hpp"
#include "bucksim/model_params.hpp"

namespace bucksim {

struct StochConfig {
    double epsilon = 0.05;
    double dt = 1e-3;  // 1/dt must be an integer so the grid hits every clock pulse
    int horizon = 10;
    std::uint64_t seed = 42;
    bool bridge_correction = true;
};

// Exact one-step transition of the ON-mode Ornstein-Uhlenbeck diffusion
// dX = (-alpha_on X + beta) dt + eps dW over a step h:
//   X_h = beta/alpha_on + (X_0 - beta/alpha_on) * mean_coef + sd * N(0, 1).
struct OuIncrement {
    double mean_coef = 1.0;
    double sd = 0.0;

    static OuIncrement make(const ConverterParams& p, double h, double eps);
};

double ou_step(const ConverterParams& p, double x, double h, double eps, double gauss);

// Probability that a Brownian bridge with diffusion eps, pinned at x1 and x2
// over a step h, touched `level` in between. Both endpoints must be <= level.
double crossing_probability(double x1, double x2, double level, double h, double eps);

// Quadratic variation <I>_t of I_t = int_0^t e^{alpha_on u} dW_u, and its inverse.
double time_change(const ConverterParams& p, double t);
double inverse_time_change(const ConverterParams& p, double s);

// Grid steps per clock period; throws ConfigError unless 1/dt is an integer.
long steps_per_unit(double dt);

// One realisation of the stochastic switching process sampled on the grid.
// Between grid nodes the ON phase is linearly interpolated (ending at
// (tau, x_ref)); the OFF phase is evaluated in closed form.
class StochPath final : public HybridPath {
public:
    StochPath(ConverterParams p, long steps_per_unit, Schedule schedule, std::vector<double> grid_x,
              std::vector<int> grid_y, std::uint64_t replica_seed, double lipschitz);

    double horizon() const override { return schedule_.horizon; }
    HybridState at(double t) const override;
    std::vector<double> jump_times() const override { return schedule_jumps(schedule_); }
    double lipschitz_bound() const override { return lipschitz_; }

    const Schedule& schedule() const { return schedule_; }
    std::size_t grid_size() const { return grid_x_.size(); }
    double grid_time(std::size_t k) const { return static_cast<double>(k) / static_cast<double>(n_); }
    const std::vector<double>& grid_x() const { return grid_x_; }
    const std::vector<int>& grid_y() const { return grid_y_; }
    std::uint64_t replica_seed() const { return seed_; }

    // Cycles whose ON phase spanned at least one clock pulse (sigma_n - sigma_{n-1} > 1).
    std::size_t slow_passages() const;

private:
    ConverterParams p_;
    long n_;
    Schedule schedule_;
    std::vector<double> grid_x_;
    std::vector<int> grid_y_;
    std::uint64_t seed_;
    double lipschitz_;
};

// Simulates replica `replica` of the stochastic switching process from
// z0 = (x0, 1), x0 in (0, x_ref). The replica draws from stream_seed(cfg.seed, replica).
StochPath simulate_stoch(const ConverterParams& p, HybridState z0, const StochConfig& cfg,
                         std::uint64_t replica = 0);

} // namespace bucksim
