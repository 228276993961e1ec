#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bucksim/hybrid.hpp"

namespace bucksim {

// Euclidean metric on R x {0, 1}.
double r_metric(const HybridState& a, const HybridState& b);

// Strictly increasing piecewise-linear bijection of [0, T] given by its knots.
//
// For such a map the distortion sup_{s<t} |log((lam(t) - lam(s)) / (t - s))|
// equals the largest |log slope| over the pieces: every chord slope is a
// weighted average of the slopes of the pieces it spans, so it lies between
// the smallest and largest piece slope, and both extremes are attained by
// chords inside a single piece.
class TimeDeformation {
public:
    // Throws DomainError unless t and v are strictly increasing, start at 0
    // and end at the same T > 0.
    TimeDeformation(std::vector<double> t, std::vector<double> v);

    static TimeDeformation identity(double horizon);

    double horizon() const { return t_.back(); }
    double operator()(double t) const;
    double inverse(double s) const;
    TimeDeformation inverted() const { return TimeDeformation(v_, t_); }

    double gamma() const;
    double max_slope() const;
    std::vector<double> slopes() const;
    const std::vector<double>& knot_times() const { return t_; }
    const std::vector<double>& knot_values() const { return v_; }

private:
    std::vector<double> t_;
    std::vector<double> v_;
    bool is_identity_ = false;  // evaluates exactly, without interpolation round-off
};

double gamma(const TimeDeformation& lam);

// outer(inner(t)).
TimeDeformation compose(const TimeDeformation& outer, const TimeDeformation& inner);

// Piecewise-linear map sending s_{n-1} -> s_{n-1}, t_n -> tau_n, s_n -> s_n.
// Empty when the two schedules disagree on the cycle structure (different
// cycle counts, or some sigma_n != s_n), in which case the identity is the
// fallback deformation.
std::optional<TimeDeformation> paper_lambda(const Schedule& det, const Schedule& stoch, double horizon);

struct DistanceBound {
    double gamma = 0.0;
    double sup_r = 0.0;
    double bound = 0.0;         // gamma v sup_r
    double grid_modulus = 0.0;  // how much the true sup can exceed the sampled one
    bool modes_aligned = true;  // y1(t) == y2(lam(t)) at every sampled t
    std::string method;
};

// gamma(lam) v sup_t r(z1(t), z2(lam(t))): an upper bound on the Skorokhod
// distance. The sup is sampled on a grid of step <= grid_step augmented with
// the jump times of z1 and the lam-preimages of the jump times of z2.
DistanceBound sk_upper_bound(const HybridPath& z1, const HybridPath& z2, const TimeDeformation& lam,
                             double grid_step = 1e-3, std::string method = "lambda");

// Uniform distance sup_t r(z1(t), z2(t)), i.e. sk_upper_bound at lam = identity.
DistanceBound uniform_distance(const HybridPath& z1, const HybridPath& z2, double grid_step = 1e-3);

struct BruteForceOptions {
    int knots = 8;       // pieces per segment between aligned anchors
    int slopes = 9;      // candidate slopes per knot move
    int max_sweeps = 80;
    double grid_step = 1e-3;
    unsigned threads = 1;
};

// Small-instance reference for the Skorokhod distance: searches piecewise
// linear deformations (identity-anchored and jump-aligned families, free knots
// moved by coordinate descent over a slope grid) and returns the best bound
// found. Refuses horizons above 3 or more than 4 jumps per path.
DistanceBound sk_bruteforce(const HybridPath& z1, const HybridPath& z2, const BruteForceOptions& opts = {});

// Path given by an evaluation function; used for hand-built instances.
class FunctionPath final : public HybridPath {
public:
    FunctionPath(double horizon, std::function<HybridState(double)> eval, std::vector<double> jumps,
                 double lipschitz)
        : horizon_(horizon), eval_(std::move(eval)), jumps_(std::move(jumps)), lipschitz_(lipschitz) {}

    double horizon() const override { return horizon_; }
    HybridState at(double t) const override { return eval_(t); }
    std::vector<double> jump_times() const override { return jumps_; }
    double lipschitz_bound() const override { return lipschitz_; }

private:
    double horizon_;
    std::function<HybridState(double)> eval_;
    std::vector<double> jumps_;
    double lipschitz_;
};

} // namespace bucksim
