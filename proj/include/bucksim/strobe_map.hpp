#pragma once

#include <cstddef>
#include <vector>

#include "bucksim/model_params.hpp"

namespace bucksim {

enum class StrobeBranch {
    Smooth,    // x <= x_border: ON for the whole period
    Switching  // x > x_border: hits x_ref, then decays until the clock pulse
};

// Initial state whose ON flow reaches x_ref exactly one period later.
double x_border(const ConverterParams& p);

StrobeBranch strobe_branch(const ConverterParams& p, double x);

// Stroboscopic map x(0) -> x(1) for initial mode ON. Domain [0, x_ref].
// At x == x_border the smooth-branch formula is used (both agree there).
double strobe_f(const ConverterParams& p, double x);

// Derivative of the stroboscopic map; throws DomainError at x_border, where
// it jumps.
double strobe_f_prime(const ConverterParams& p, double x);

struct FixedPoint {
    double x_star = 0.0;
    double f_prime_at_star = 0.0;
    int iterations = 0;
};

// Bisection on f(x) - x over [x_border, x_ref].
FixedPoint find_fixed_point(const ConverterParams& p, double tol = 1e-12, int max_iter = 200);

// x0, f(x0), f(f(x0)), ... (n + 1 values).
std::vector<double> cobweb(const ConverterParams& p, double x0, std::size_t n);

} // namespace bucksim
