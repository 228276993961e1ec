#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bucksim {

// Rescaled first-order buck converter. ON mode: dx/dt = -alpha_on x + beta;
// OFF mode: dx/dt = -alpha_off x. Clock period is fixed to 1.
struct ConverterParams {
    double alpha_on = 0.0;
    double alpha_off = 0.0;
    double beta = 0.0;
    double x_ref = 0.0;

    // Stable equilibrium of the ON flow.
    double on_equilibrium() const { return beta / alpha_on; }
};

// Reference parameter set used throughout the tests and the default CLI config.
ConverterParams reference_params();

struct Violation {
    std::string name;      // e.g. "beta lower bound"
    std::string relation;  // human readable, e.g. "2*x_ref*alpha_on < beta"
    double lhs = 0.0;
    double rhs = 0.0;
};

struct ValidationResult {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool violates(std::string_view name) const;
    std::string describe() const;
};

// Checks the standing parameter assumptions with strict inequalities.
// Throws ConfigError when a field is non-finite or non-positive; that case is
// an input problem, not an inequality violation.
ValidationResult validate_params(const ConverterParams& p);

// Closed-form constants of the periodic orbit and of the tail estimates.
struct DerivedConstants {
    double x_border = 0.0;
    double x_star = 0.0;
    double t_star = 0.0;
    double t_on = 0.0;
    double t_off = 0.0;
    double t_min = 0.0;
    double mu = 0.0;
    double k_minus = 0.0;
    double k_plus = 0.0;
    double k = 0.0;
    double delta_plus = 0.0;
    double f_prime_at_star = 0.0;
};

// Requires validate_params(p).ok(); throws DomainError otherwise.
DerivedConstants derive_constants(const ConverterParams& p);

// Circuit-level helper: beta = V_in/L, alpha_on = R/L, alpha_off = (R + r_d)/L.
// The threshold current is a controller setting and is passed through. No
// validation is applied.
ConverterParams params_from_circuit(double v_in, double r_load, double r_diode, double inductance,
                                    double x_ref);

} // namespace bucksim
