#pragma once

// Independent reference computations used by the tests. They re-derive the
// quantities from the closed-form dynamics instead of calling into the library.

#include <cmath>
#include <functional>

namespace oracle {

struct Params {
    double alpha_on = 0.5;
    double alpha_off = 0.6;
    double beta = 1.2;
    double x_ref = 1.0;
};

// Time for the ON flow started at x to reach x_ref.
inline double hit_time(const Params& p, double x) {
    const double eq = p.beta / p.alpha_on;
    return std::log((eq - x) / (eq - p.x_ref)) / p.alpha_on;
}

// Position at the next clock pulse, one period after an ON start at x.
inline double strobe(const Params& p, double x) {
    const double h = hit_time(p, x);
    if (h >= 1.0) {
        const double eq = p.beta / p.alpha_on;
        return eq + (x - eq) * std::exp(-p.alpha_on);
    }
    return p.x_ref * std::exp(-p.alpha_off * (1.0 - h));
}

// Secant iteration for a root of g starting from the pair (a, b).
inline double secant_root(const std::function<double(double)>& g, double a, double b) {
    double ga = g(a);
    double gb = g(b);
    for (int i = 0; i < 100 && std::abs(b - a) > 1e-15; ++i) {
        const double c = b - gb * (b - a) / (gb - ga);
        a = b;
        ga = gb;
        b = c;
        gb = g(b);
    }
    return b;
}

inline double fixed_point(const Params& p) {
    return secant_root([&](double x) { return strobe(p, x) - x; }, 0.6, 0.8);
}

inline double central_difference(const std::function<double(double)>& g, double x, double h = 1e-6) {
    return (g(x + h) - g(x - h)) / (2.0 * h);
}

// Upper tail of the standard normal by composite Simpson quadrature on [x, x + 12].
inline double normal_tail(double x) {
    const int n = 200000;
    const double b = x + 12.0;
    const double h = (b - x) / n;
    auto phi = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); };
    double s = phi(x) + phi(b);
    for (int i = 1; i < n; ++i) s += phi(x + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace oracle
