#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bucksim/errors.hpp"
#include "bucksim/strobe_map.hpp"
#include "oracles.hpp"

using namespace bucksim;
using Catch::Approx;

namespace {
const ConverterParams P = reference_params();
const oracle::Params OP;
} // namespace

TEST_CASE("strobe map matches the closed-form one-period flow") {
    for (double x = 0.01; x < 1.0; x += 0.0137) {
        INFO("x = " << x);
        CHECK(strobe_f(P, x) == Approx(oracle::strobe(OP, x)).margin(1e-13));
    }
}

TEST_CASE("strobe map is continuous at the border and branches correctly") {
    const double xb = x_border(P);
    CHECK(strobe_branch(P, xb) == StrobeBranch::Smooth);
    CHECK(strobe_branch(P, xb + 1e-9) == StrobeBranch::Switching);
    CHECK(strobe_f(P, xb) == Approx(1.0).margin(1e-12));
    CHECK(strobe_f(P, xb + 1e-10) == Approx(strobe_f(P, xb)).margin(1e-9));
    CHECK(strobe_f(P, P.x_ref) == Approx(std::exp(-P.alpha_off)).margin(1e-14));
}

TEST_CASE("strobe derivative matches finite differences on both branches") {
    for (double x : {0.02, 0.05, 0.3, 0.5, 0.695, 0.9}) {
        const double fd = oracle::central_difference([](double y) { return oracle::strobe(OP, y); }, x);
        CHECK(strobe_f_prime(P, x) == Approx(fd).margin(1e-6));
    }
    CHECK_THROWS_AS(strobe_f_prime(P, x_border(P)), DomainError);
}

TEST_CASE("strobe map rejects points outside [0, x_ref]") {
    CHECK_THROWS_AS(strobe_f(P, -0.1), DomainError);
    CHECK_THROWS_AS(strobe_f(P, 1.1), DomainError);
}

TEST_CASE("bisection fixed point agrees with plain map iteration") {
    const auto fp = find_fixed_point(P);
    const auto orbit = cobweb(P, 0.1, 200);
    CHECK(std::abs(orbit.back() - fp.x_star) <= 1e-9);
    CHECK(fp.x_star > x_border(P));
    CHECK(fp.x_star < P.x_ref);
    CHECK(std::abs(fp.f_prime_at_star) < 1.0);
    CHECK(fp.iterations <= 200);
    CHECK(fp.x_star == Approx(oracle::fixed_point(OP)).margin(1e-11));
    CHECK(fp.x_star == Approx(0.695).margin(0.001));
}

TEST_CASE("cobweb returns the orbit including the start") {
    const auto xs = cobweb(P, 0.3, 5);
    REQUIRE(xs.size() == 6);
    CHECK(xs[0] == 0.3);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) CHECK(xs[i + 1] == strobe_f(P, xs[i]));
}

TEST_CASE("fixed point of a second admissible parameter set") {
    ConverterParams q{.alpha_on = 0.4, .alpha_off = 0.5, .beta = 0.95, .x_ref = 1.0};
    REQUIRE(validate_params(q).ok());
    const oracle::Params oq{0.4, 0.5, 0.95, 1.0};
    const auto fp = find_fixed_point(q);
    CHECK(fp.x_star == Approx(oracle::fixed_point(oq)).margin(1e-10));
}
