#pragma once

#include <vector>

#include "bucksim/hybrid.hpp"
#include "bucksim/model_params.hpp"

namespace bucksim {

// ON flow from x0 after time dt.
double on_flow(const ConverterParams& p, double x0, double dt);

// OFF flow from x_ref after time dt.
double off_flow(const ConverterParams& p, double dt);

// Time for the ON flow from x0 to reach x_ref; 0 when x0 >= x_ref.
// Throws DomainError when x0 >= beta/alpha_on.
double on_hit_time(const ConverterParams& p, double x0);

// Smallest integer strictly greater than t. Values within 1e-12 (relative) of
// an integer are treated as that integer first, so a switch landing on a clock
// pulse up to rounding skips it.
double next_clock_pulse(double t);

// Closed-form deterministic trajectory made of ON/OFF segments.
class DetPath final : public HybridPath {
public:
    struct Segment {
        double start = 0.0;
        double end = 0.0;
        int mode = 1;
        double x_start = 0.0;
    };

    DetPath(ConverterParams p, HybridState z0, Schedule schedule, std::vector<Segment> segments);

    double horizon() const override { return schedule_.horizon; }
    HybridState at(double t) const override;
    std::vector<double> jump_times() const override { return schedule_jumps(schedule_); }
    double lipschitz_bound() const override;

    const Schedule& schedule() const { return schedule_; }
    const std::vector<Segment>& segments() const { return segments_; }
    const HybridState& initial() const { return z0_; }
    const ConverterParams& params() const { return p_; }

    // Value just before t (left limit); equals at(t) away from switch times.
    HybridState left_limit(double t) const;

    // Lebesgue measure of {t in [0, horizon] : y(t) = 1}.
    double on_time() const;

private:
    double segment_value(const Segment& s, double t) const;

    ConverterParams p_;
    HybridState z0_;
    Schedule schedule_;
    std::vector<Segment> segments_;
};

// Builds the trajectory on [0, horizon] from z0. For y0 = 1 requires
// x0 in (0, x_ref); for y0 = 0 the path decays until the first clock pulse.
DetPath simulate_det(const ConverterParams& p, HybridState z0, int horizon);

// Range-checked evaluation; throws DomainError outside [0, horizon].
HybridState eval_det(const DetPath& path, double t);

} // namespace bucksim
