#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bucksim/model_params.hpp"

namespace bucksim {

// Upper tail of the standard normal, 1/sqrt(2 pi) int_x^inf e^{-t^2/2} dt.
double gaussian_tail(double x);

// (3/sqrt(2 pi)) x^2 e^{-x^2/2}; dominates gaussian_tail for x >= 1.
double gaussian_tail_estimate(double x);

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct McConfig {
    std::vector<double> epsilons;
    double nu = 0.0;        // horizon exponent, T_eps = floor(horizon_scale / eps^nu)
    double varsigma = 0.8;  // delta = eps^varsigma
    int horizon_scale = 10;
    double p = 1.0;         // moment order
    std::size_t replicas = 1000;
    std::uint64_t seed = 42;
    double dt = 1e-3;
    bool bridge_correction = true;
    unsigned threads = 0;   // 0 = all cores

    // Throws ConfigError on out-of-range exponents or counts.
    void validate() const;
    int horizon_for(double eps) const;
    double delta_for(double eps) const;
};

struct EventFrequency {
    std::size_t count = 0;
    double freq = 0.0;
    double se = 0.0;
    WilsonInterval wilson;
};

EventFrequency event_frequency(std::size_t count, std::size_t trials);

// Frequencies of B_n (first cycle n with |tau_n - t_n| > delta) and its
// early/late split, against the Gaussian tail bounds.
struct BadEventReport {
    double epsilon = 0.0;
    int horizon = 0;
    double delta = 0.0;
    std::size_t replicas = 0;
    std::vector<EventFrequency> per_cycle;  // index n - 1
    std::vector<EventFrequency> early;      // tau_n < t_n - delta
    std::vector<EventFrequency> late;       // tau_n > t_n + delta
    EventFrequency pooled;                  // complement of the good event G_T
    double bound = 0.0;                     // 3 T(K delta / eps)
    double bound_early = 0.0;               // 2 T(K_- delta / eps)
    double bound_late = 0.0;                // T(K_+ delta / eps)
    bool bound_guaranteed = true;           // delta < delta_+
    double good_freq = 1.0;
    std::size_t anomalies = 0;              // replicas with an ON phase spanning a clock pulse
    bool dominance_ok = true;               // per-cycle freq <= bound + 3 se for every n
    bool split_dominance_ok = true;
};

// Certified per-path upper bounds on the Skorokhod distance, aggregated.
struct DistanceMomentReport {
    double epsilon = 0.0;
    int horizon = 0;
    double delta = 0.0;
    double p = 1.0;
    std::size_t replicas = 0;
    double mean_d = 0.0;
    double se_d = 0.0;
    double moment = 0.0;  // mean of d^p
    double moment_se = 0.0;
    double q90 = 0.0;
    double q99 = 0.0;
    double max_d = 0.0;
    double good_freq = 1.0;
    std::size_t aligned_used = 0;          // replicas where the schedule-aligned deformation was tighter
    std::size_t lemma_checked = 0;          // good-event replicas with delta <= t_min / (4 T)
    std::size_t gamma_lemma_violations = 0; // gamma > 4 T delta / t_min
    std::size_t mode_alignment_violations = 0;
    std::size_t anomalies = 0;
};

BadEventReport bad_event_probs(const ConverterParams& p, const DerivedConstants& dc, const McConfig& cfg, double eps);

DistanceMomentReport distance_moment(const ConverterParams& p, const DerivedConstants& dc, const McConfig& cfg,
                                     double eps);

struct McRow {
    BadEventReport events;
    DistanceMomentReport distance;
};

struct McReport {
    McConfig config;
    std::vector<McRow> rows;
};

// Runs every epsilon of cfg; each replica is simulated once and feeds both
// the event statistics and the distance moment.
McReport sweep(const ConverterParams& p, const McConfig& cfg);

// Columns: epsilon, T_eps, delta, n, emp_prob, wilson_lo, wilson_hi, bound,
// emp_d_mean, emp_dp_moment, dp_se, good_freq, anomalies. One row per cycle n
// plus a "pooled" row per epsilon.
std::string report_csv(const McReport& report);

// Pass/fail of each bound check plus the statistics that do not fit the CSV.
std::string report_summary_json(const McReport& report);

// True when every applicable bound check and every lemma check passed. Bounds
// that need delta < delta_plus are informational once delta reaches it.
bool report_checks_pass(const McReport& report);

} // namespace bucksim
