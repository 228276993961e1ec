#include "bucksim/strobe_map.hpp"

#include <cmath>

#include <fmt/format.h>

#include "bucksim/errors.hpp"

namespace bucksim {

double x_border(const ConverterParams& p) {
    const double eq = p.on_equilibrium();
    return eq + (p.x_ref - eq) * std::exp(p.alpha_on);
}

StrobeBranch strobe_branch(const ConverterParams& p, double x) {
    return x <= x_border(p) ? StrobeBranch::Smooth : StrobeBranch::Switching;
}

namespace {

void check_domain(const ConverterParams& p, double x) {
    if (!(x >= 0.0 && x <= p.x_ref)) {
        throw DomainError(fmt::format("strobe map argument {} outside [0, {}]", x, p.x_ref));
    }
}

} // namespace

double strobe_f(const ConverterParams& p, double x) {
    check_domain(p, x);
    const double eq = p.on_equilibrium();
    if (strobe_branch(p, x) == StrobeBranch::Smooth) {
        return eq + (x - eq) * std::exp(-p.alpha_on);
    }
    return p.x_ref * std::exp(-p.alpha_off) *
           std::pow((eq - x) / (eq - p.x_ref), p.alpha_off / p.alpha_on);
}

double strobe_f_prime(const ConverterParams& p, double x) {
    check_domain(p, x);
    if (x == x_border(p)) {
        throw DomainError("strobe map derivative is undefined at x_border");
    }
    if (strobe_branch(p, x) == StrobeBranch::Smooth) return std::exp(-p.alpha_on);
    return -p.alpha_off * strobe_f(p, x) / (p.beta - p.alpha_on * x);
}

FixedPoint find_fixed_point(const ConverterParams& p, double tol, int max_iter) {
    // The root lies on the switching branch: f(x) > x on [0, x_border].
    double lo = x_border(p);
    double hi = p.x_ref;
    auto h = [&](double x) { return strobe_f(p, x) - x; };
    if (!(h(lo) > 0.0 && h(hi) < 0.0)) {
        throw InternalError(fmt::format("fixed point not bracketed on [{}, {}]", lo, hi));
    }

    FixedPoint fp;
    while (hi - lo > tol && fp.iterations < max_iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (h(mid) > 0.0 ? lo : hi) = mid;
        ++fp.iterations;
    }
    fp.x_star = 0.5 * (lo + hi);
    fp.f_prime_at_star = strobe_f_prime(p, fp.x_star);
    return fp;
}

std::vector<double> cobweb(const ConverterParams& p, double x0, std::size_t n) {
    std::vector<double> xs;
    xs.reserve(n + 1);
    xs.push_back(x0);
    for (std::size_t i = 0; i < n; ++i) xs.push_back(strobe_f(p, xs.back()));
    return xs;
}

} // namespace bucksim
