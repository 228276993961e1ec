#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "bucksim/errors.hpp"
#include "bucksim/model_params.hpp"
#include "oracles.hpp"

using namespace bucksim;
using Catch::Approx;

TEST_CASE("reference parameters satisfy every standing inequality") {
    const auto r = validate_params(reference_params());
    CHECK(r.ok());
    CHECK(r.describe() == "ok");
}

TEST_CASE("single-inequality perturbations are named") {
    struct Case {
        double ConverterParams::*field;
        double value;
        const char* name;
    };
    const Case cases[] = {
        {&ConverterParams::beta, 0.9, "beta lower bound"},
        {&ConverterParams::beta, 1.3, "beta upper bound"},
        {&ConverterParams::alpha_off, 0.45, "alpha_off lower bound"},
        {&ConverterParams::alpha_off, 0.75, "alpha_off upper bound"},
        {&ConverterParams::alpha_on, 0.8, "alpha_on < log 2"},
        {&ConverterParams::x_ref, 2.4, "x_ref below equilibrium"},
    };
    for (const auto& c : cases) {
        ConverterParams p = reference_params();
        p.*(c.field) = c.value;
        const auto r = validate_params(p);
        INFO(c.name);
        CHECK_FALSE(r.ok());
        CHECK(r.violates(c.name));
        CHECK(r.describe().find(c.name) != std::string::npos);
    }
}

TEST_CASE("non-finite or non-positive parameters are configuration errors") {
    for (double bad : {0.0, -1.0, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()}) {
        ConverterParams p = reference_params();
        p.beta = bad;
        CHECK_THROWS_AS(validate_params(p), ConfigError);
    }
}

TEST_CASE("derived constants agree with an independent fixed-point solve") {
    const oracle::Params op;
    const double xs = oracle::fixed_point(op);
    const double ts = oracle::hit_time(op, xs);
    const auto dc = derive_constants(reference_params());

    CHECK(dc.x_star == Approx(xs).margin(1e-10));
    CHECK(dc.t_star == Approx(ts).margin(1e-9));
    CHECK(dc.x_border == Approx(1.2 / 0.5 + (1.0 - 1.2 / 0.5) * std::exp(0.5)).margin(1e-14));
    CHECK(dc.t_on + dc.t_off == Approx(1.0).margin(1e-14));
    CHECK(dc.t_min == std::min(dc.t_on, dc.t_off));

    const double mu = 1.2 - (0.5 + 0.6) * 1.0;
    CHECK(dc.mu == Approx(0.1).margin(1e-12));
    CHECK(dc.k_plus == Approx(mu * std::sqrt(0.25)).margin(1e-12));
    CHECK(dc.k_minus == Approx(std::sqrt(1.0) * std::exp(-0.5 * ts) * mu).margin(1e-9));
    CHECK(dc.k == std::min(dc.k_minus, dc.k_plus));
    CHECK(dc.delta_plus == Approx(std::log((2.4 - 1.0) / (1.2 - 0.5 + 0.6)) / 0.5).margin(1e-12));

    const double slope = oracle::central_difference([&](double x) { return oracle::strobe(op, x); }, xs);
    CHECK(dc.f_prime_at_star == Approx(slope).margin(1e-6));
    CHECK(std::abs(dc.f_prime_at_star) == Approx(0.489).margin(0.002));
}

TEST_CASE("derived constants refuse parameters outside the admissible set") {
    ConverterParams p = reference_params();
    p.beta = 0.9;
    CHECK_THROWS_AS(derive_constants(p), DomainError);
}

TEST_CASE("circuit quantities map onto the normalised coefficients") {
    const auto p = params_from_circuit(12.0, 5.0, 1.0, 10.0, 1.0);
    CHECK(p.alpha_on == Approx(0.5));
    CHECK(p.alpha_off == Approx(0.6));
    CHECK(p.beta == Approx(1.2));
    CHECK(validate_params(p).ok());
}
