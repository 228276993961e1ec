#include "bucksim/det_engine.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bucksim/errors.hpp"

namespace bucksim {

std::size_t Schedule::complete_cycles() const {
    return static_cast<std::size_t>(
        std::count_if(cycles.begin(), cycles.end(), [](const Cycle& c) { return c.complete(); }));
}

std::vector<double> schedule_jumps(const Schedule& s) {
    std::vector<double> jumps;
    auto add = [&](double t) {
        if (t > 0.0 && t <= s.horizon) jumps.push_back(t);
    };
    if (s.initial_off_until) add(*s.initial_off_until);
    for (const auto& c : s.cycles) {
        if (c.off_time) add(*c.off_time);
        if (c.next_on) add(*c.next_on);
    }
    return jumps;
}

double on_flow(const ConverterParams& p, double x0, double dt) {
    const double eq = p.on_equilibrium();
    return eq + (x0 - eq) * std::exp(-p.alpha_on * dt);
}

double off_flow(const ConverterParams& p, double dt) {
    return p.x_ref * std::exp(-p.alpha_off * dt);
}

double on_hit_time(const ConverterParams& p, double x0) {
    const double eq = p.on_equilibrium();
    if (x0 >= eq) {
        throw DomainError(fmt::format("ON flow from {} never reaches x_ref (equilibrium {})", x0, eq));
    }
    if (x0 >= p.x_ref) return 0.0;
    return std::log((eq - x0) / (eq - p.x_ref)) / p.alpha_on;
}

double next_clock_pulse(double t) {
    const double r = std::round(t);
    if (std::abs(t - r) <= 1e-12 * std::max(1.0, std::abs(t))) t = r;
    return std::floor(t) + 1.0;
}

DetPath::DetPath(ConverterParams p, HybridState z0, Schedule schedule, std::vector<Segment> segments)
    : p_(p), z0_(z0), schedule_(std::move(schedule)), segments_(std::move(segments)) {
    if (segments_.empty()) throw InternalError("deterministic path without segments");
}

double DetPath::segment_value(const Segment& s, double t) const {
    const double dt = t - s.start;
    if (s.mode == 1) return on_flow(p_, s.x_start, dt);
    return s.x_start * std::exp(-p_.alpha_off * dt);
}

HybridState DetPath::at(double t) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const Segment& s) { return v < s.start; });
    if (it != segments_.begin()) --it;
    return {segment_value(*it, t), it->mode};
}

HybridState DetPath::left_limit(double t) const {
    auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                               [](const Segment& s, double v) { return s.start < v; });
    if (it == segments_.begin()) return at(t);
    --it;
    return {segment_value(*it, t), it->mode};
}

double DetPath::lipschitz_bound() const {
    double bound = 0.0;
    for (const auto& s : segments_) {
        if (s.mode == 1) {
            const double x_end = segment_value(s, s.end);
            bound = std::max({bound, std::abs(p_.beta - p_.alpha_on * s.x_start),
                              std::abs(p_.beta - p_.alpha_on * x_end)});
        } else {
            bound = std::max(bound, p_.alpha_off * std::abs(s.x_start));
        }
    }
    return bound;
}

double DetPath::on_time() const {
    double total = 0.0;
    for (const auto& s : segments_) {
        if (s.mode == 1) total += s.end - s.start;
    }
    return total;
}

DetPath simulate_det(const ConverterParams& p, HybridState z0, int horizon) {
    if (horizon < 0) throw DomainError("horizon must be non-negative");
    if (z0.y != 0 && z0.y != 1) throw DomainError("mode must be 0 or 1");
    if (!(z0.x > 0.0 && z0.x < p.x_ref)) {
        throw DomainError(fmt::format("initial state {} outside (0, x_ref = {})", z0.x, p.x_ref));
    }
    const double T = horizon;

    Schedule schedule;
    schedule.horizon = T;
    std::vector<DetPath::Segment> segments;

    double t = 0.0;
    double x = z0.x;
    if (z0.y == 0) {
        schedule.initial_off_until = 1.0;
        segments.push_back({0.0, std::min(1.0, T), 0, x});
        if (T < 1.0) return DetPath(p, z0, std::move(schedule), std::move(segments));
        x *= std::exp(-p.alpha_off);
        t = 1.0;
    }

    while (t < T) {
        Cycle cycle;
        cycle.on_start = t;
        const double tn = t + on_hit_time(p, x);
        if (tn > T) {
            segments.push_back({t, T, 1, x});
            schedule.cycles.push_back(cycle);
            return DetPath(p, z0, std::move(schedule), std::move(segments));
        }
        segments.push_back({t, tn, 1, x});
        cycle.off_time = tn;

        // Pulses that arrive while ON are ignored; the next one strictly after tn counts.
        const double sn = next_clock_pulse(tn);
        if (sn > T) {
            segments.push_back({tn, T, 0, p.x_ref});
            schedule.cycles.push_back(cycle);
            return DetPath(p, z0, std::move(schedule), std::move(segments));
        }
        segments.push_back({tn, sn, 0, p.x_ref});
        cycle.next_on = sn;
        schedule.cycles.push_back(cycle);
        x = off_flow(p, sn - tn);
        t = sn;
    }
    // The horizon coincides with a clock pulse (or is 0): the path is ON at T.
    segments.push_back({T, T, 1, x});
    return DetPath(p, z0, std::move(schedule), std::move(segments));
}

HybridState eval_det(const DetPath& path, double t) {
    if (!(t >= 0.0 && t <= path.horizon())) {
        throw DomainError(fmt::format("time {} outside [0, {}]", t, path.horizon()));
    }
    return path.at(t);
}

} // namespace bucksim
