#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace bucksim {

// Point of R x {0, 1}: continuous current x and mode y (1 = ON, 0 = OFF).
struct HybridState {
    double x = 0.0;
    int y = 1;
};

// One ON/OFF cycle: ON from on_start until off_time, OFF until next_on.
// A cycle cut by the horizon has no off_time (still ON at the horizon) or no
// next_on (switched OFF exactly at the horizon).
struct Cycle {
    double on_start = 0.0;
    std::optional<double> off_time;
    std::optional<double> next_on;

    bool complete() const { return off_time.has_value() && next_on.has_value(); }
};

// Switching schedule of a trajectory on [0, horizon]. For a path started in
// the OFF mode, initial_off_until holds the first clock pulse.
struct Schedule {
    std::vector<Cycle> cycles;
    double horizon = 0.0;
    std::optional<double> initial_off_until;

    std::size_t complete_cycles() const;
};

// Right-continuous path with left limits on [0, horizon()].
class HybridPath {
public:
    virtual ~HybridPath() = default;

    virtual double horizon() const = 0;
    virtual HybridState at(double t) const = 0;
    // Mode switch times in (0, horizon()], increasing.
    virtual std::vector<double> jump_times() const = 0;
    // Upper bound on |dx/dt| between jumps; feeds the grid-resolution term of
    // sup-norm estimates.
    virtual double lipschitz_bound() const = 0;
};

// Mode switch times recorded in a schedule, restricted to (0, horizon].
std::vector<double> schedule_jumps(const Schedule& s);

} // namespace bucksim
