#include "bucksim/model_params.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "bucksim/errors.hpp"
#include "bucksim/strobe_map.hpp"

namespace bucksim {

ConverterParams reference_params() {
    return ConverterParams{.alpha_on = 0.5, .alpha_off = 0.6, .beta = 1.2, .x_ref = 1.0};
}

bool ValidationResult::violates(std::string_view name) const {
    for (const auto& v : violations) {
        if (v.name == name) return true;
    }
    return false;
}

std::string ValidationResult::describe() const {
    if (ok()) return "ok";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        const auto& v = violations[i];
        if (i) os << "; ";
        os << v.name << " (" << v.relation << " fails: " << fmt::format("{:.10g}", v.lhs)
           << " vs " << fmt::format("{:.10g}", v.rhs) << ")";
    }
    return os.str();
}

namespace {

void require_positive(const char* name, double value) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw ConfigError(fmt::format("parameter {} must be finite and > 0 (got {})", name, value));
    }
}

} // namespace

ValidationResult validate_params(const ConverterParams& p) {
    require_positive("alpha_on", p.alpha_on);
    require_positive("alpha_off", p.alpha_off);
    require_positive("beta", p.beta);
    require_positive("x_ref", p.x_ref);

    ValidationResult result;
    // Records a violation unless lhs < rhs holds strictly.
    auto check = [&](const char* name, const char* relation, double lhs, double rhs) {
        if (!(lhs < rhs)) result.violations.push_back({name, relation, lhs, rhs});
    };

    const double a = p.alpha_on;
    const double ea = std::exp(a);
    check("alpha_on < log 2", "alpha_on < log 2", a, std::log(2.0));
    check("beta lower bound", "2*x_ref*alpha_on < beta", 2.0 * p.x_ref * a, p.beta);
    check("beta upper bound", "beta < e^a/(e^a-1)*x_ref*alpha_on", p.beta,
          ea / (ea - 1.0) * p.x_ref * a);
    check("alpha_off lower bound", "alpha_on < alpha_off", a, p.alpha_off);
    check("alpha_off upper bound", "alpha_off < ((beta/alpha_on - x_ref)/x_ref)*alpha_on",
          p.alpha_off, (p.beta / a - p.x_ref) / p.x_ref * a);
    check("x_ref below equilibrium", "x_ref < beta/alpha_on", p.x_ref, p.beta / a);
    return result;
}

DerivedConstants derive_constants(const ConverterParams& p) {
    const auto validation = validate_params(p);
    if (!validation.ok()) {
        throw DomainError("invalid converter parameters: " + validation.describe());
    }

    DerivedConstants dc;
    dc.x_border = x_border(p);
    const FixedPoint fp = find_fixed_point(p);
    dc.x_star = fp.x_star;
    dc.f_prime_at_star = fp.f_prime_at_star;

    const double eq = p.on_equilibrium();
    dc.t_star = std::log((eq - dc.x_star) / (eq - p.x_ref)) / p.alpha_on;
    dc.t_on = dc.t_star;
    dc.t_off = 1.0 - dc.t_star;
    dc.t_min = std::min(dc.t_on, dc.t_off);

    dc.mu = p.beta - (p.alpha_on + p.alpha_off) * p.x_ref;
    dc.k_minus = std::sqrt(2.0 * p.alpha_on) * std::exp(-p.alpha_on * dc.t_star) * dc.mu;
    dc.k_plus = dc.mu * std::sqrt(p.alpha_on / 2.0);
    dc.k = std::min(dc.k_minus, dc.k_plus);
    dc.delta_plus = std::log((2.0 * p.beta - 2.0 * p.alpha_on * p.x_ref) /
                             (p.beta - p.alpha_on * p.x_ref + p.alpha_off * p.x_ref)) /
                    p.alpha_on;

    if (!(dc.x_border > 0.0 && dc.x_border < dc.x_star && dc.x_star < p.x_ref) ||
        !(dc.t_star > 0.0 && dc.t_star < 1.0) || !(dc.mu > 0.0) || !(dc.delta_plus > 0.0) ||
        !(std::abs(dc.f_prime_at_star) < 1.0)) {
        throw InternalError("derived constants violate their invariants for valid parameters");
    }
    return dc;
}

ConverterParams params_from_circuit(double v_in, double r_load, double r_diode, double inductance,
                                    double x_ref) {
    return ConverterParams{.alpha_on = r_load / inductance,
                           .alpha_off = (r_load + r_diode) / inductance,
                           .beta = v_in / inductance,
                           .x_ref = x_ref};
}

} // namespace bucksim
