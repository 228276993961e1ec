#include "bucksim/flln_mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>
#include <json.hpp>

#include "bucksim/det_engine.hpp"
#include "bucksim/errors.hpp"
#include "bucksim/parallel.hpp"
#include "bucksim/report_io.hpp"
#include "bucksim/sde_engine.hpp"
#include "bucksim/skorokhod.hpp"

namespace bucksim {

double gaussian_tail(double x) {
    if (!(x >= 0.0)) throw DomainError(fmt::format("gaussian_tail needs x >= 0 (got {})", x));
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double gaussian_tail_estimate(double x) {
    return 3.0 / std::sqrt(2.0 * std::numbers::pi) * x * x * std::exp(-0.5 * x * x);
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}

EventFrequency event_frequency(std::size_t count, std::size_t trials) {
    EventFrequency f;
    f.count = count;
    if (trials == 0) return f;
    const double n = static_cast<double>(trials);
    f.freq = static_cast<double>(count) / n;
    f.se = std::sqrt(f.freq * (1.0 - f.freq) / n);
    f.wilson = wilson_interval(count, trials);
    return f;
}

void McConfig::validate() const {
    if (!(nu >= 0.0 && nu < 2.0 / 3.0)) throw ConfigError(fmt::format("nu must lie in [0, 2/3) (got {})", nu));
    if (!(varsigma > nu && varsigma < 1.0)) {
        throw ConfigError(fmt::format("varsigma must lie in (nu, 1) (got {})", varsigma));
    }
    if (horizon_scale < 1) throw ConfigError("horizon scale must be >= 1");
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("moment order p must be >= 1");
    if (replicas == 0) throw ConfigError("replicas must be >= 1");
    steps_per_unit(dt);
    for (double e : epsilons) {
        if (!(e >= 0.0 && e < 1.0)) throw ConfigError(fmt::format("epsilon must lie in [0, 1) (got {})", e));
    }
}

int McConfig::horizon_for(double eps) const {
    if (eps == 0.0 || nu == 0.0) return horizon_scale;
    const double cap = static_cast<double>(horizon_scale) / std::pow(eps, nu);
    return std::max(1, static_cast<int>(std::floor(cap + 1e-9)));
}

double McConfig::delta_for(double eps) const { return eps == 0.0 ? 0.0 : std::pow(eps, varsigma); }

namespace {

struct ReplicaOutcome {
    int first_bad = 0;  // 0 = good event on the whole horizon
    int bad_side = 0;   // -1 early, +1 late
    bool slow = false;
    double d = 0.0;
    bool aligned_used = false;
    bool lemma_checked = false;
    bool gamma_ok = true;
    bool modes_ok = true;
};

struct Ensemble {
    double eps = 0.0;
    int horizon = 0;
    double delta = 0.0;
    std::vector<ReplicaOutcome> outcomes;
};

Ensemble run_ensemble(const ConverterParams& p, const DerivedConstants& dc, const McConfig& cfg, double eps,
                      bool distances) {
    cfg.validate();
    Ensemble ens;
    ens.eps = eps;
    ens.horizon = cfg.horizon_for(eps);
    ens.delta = cfg.delta_for(eps);
    ens.outcomes.resize(cfg.replicas);
    // The noiseless process is the deterministic one: nothing to sample.
    if (eps == 0.0) return ens;

    const int T = ens.horizon;
    const double delta = ens.delta;
    const HybridState z0{dc.x_star, 1};
    const DetPath det = simulate_det(p, z0, T);
    const StochConfig sc{.epsilon = eps, .dt = cfg.dt, .horizon = T, .seed = cfg.seed,
                         .bridge_correction = cfg.bridge_correction};
    const double lemma_gamma = 4.0 * T * delta / dc.t_min;
    const bool lemma_regime = delta <= dc.t_min / (4.0 * T);

    parallel_for(cfg.replicas, cfg.threads, [&](std::size_t k) {
        const StochPath path = simulate_stoch(p, z0, sc, k);
        ReplicaOutcome out;
        out.slow = path.slow_passages() > 0;

        const auto& cycles = path.schedule().cycles;
        for (int n = 1; n <= T; ++n) {
            const double t_n = (n - 1) + dc.t_star;
            const auto idx = static_cast<std::size_t>(n - 1);
            const double tau = idx < cycles.size() && cycles[idx].off_time
                                   ? *cycles[idx].off_time
                                   : std::numeric_limits<double>::infinity();
            if (std::abs(tau - t_n) > delta) {
                out.first_bad = n;
                out.bad_side = tau < t_n ? -1 : 1;
                break;
            }
        }

        if (distances) {
            const DistanceBound identity = uniform_distance(det, path);
            out.d = identity.bound;
            if (auto lam = paper_lambda(det.schedule(), path.schedule(), T)) {
                const DistanceBound aligned = sk_upper_bound(det, path, *lam, 1e-3, "paper_lambda");
                if (aligned.bound < out.d) {
                    out.d = aligned.bound;
                    out.aligned_used = true;
                }
                if (out.first_bad == 0 && lemma_regime) {
                    out.lemma_checked = true;
                    out.gamma_ok = aligned.gamma <= lemma_gamma;
                    out.modes_ok = aligned.modes_aligned;
                }
            } else if (out.first_bad == 0 && lemma_regime) {
                // On the good event the schedules must line up.
                out.lemma_checked = true;
                out.gamma_ok = false;
                out.modes_ok = false;
            }
        }
        ens.outcomes[k] = out;
    });
    return ens;
}

BadEventReport summarize_events(const DerivedConstants& dc, const Ensemble& ens) {
    BadEventReport r;
    r.epsilon = ens.eps;
    r.horizon = ens.horizon;
    r.delta = ens.delta;
    r.replicas = ens.outcomes.size();
    const auto T = static_cast<std::size_t>(ens.horizon);

    std::vector<std::size_t> bad(T, 0), early(T, 0), late(T, 0);
    std::size_t any_bad = 0;
    for (const auto& o : ens.outcomes) {
        if (o.slow) ++r.anomalies;
        if (o.first_bad == 0) continue;
        ++any_bad;
        const auto i = static_cast<std::size_t>(o.first_bad - 1);
        ++bad[i];
        ++(o.bad_side < 0 ? early[i] : late[i]);
    }
    for (std::size_t i = 0; i < T; ++i) {
        r.per_cycle.push_back(event_frequency(bad[i], r.replicas));
        r.early.push_back(event_frequency(early[i], r.replicas));
        r.late.push_back(event_frequency(late[i], r.replicas));
    }
    r.pooled = event_frequency(any_bad, r.replicas);
    r.good_freq = 1.0 - r.pooled.freq;

    if (ens.eps > 0.0) {
        const double ratio = ens.delta / ens.eps;
        r.bound = 3.0 * gaussian_tail(dc.k * ratio);
        r.bound_early = 2.0 * gaussian_tail(dc.k_minus * ratio);
        r.bound_late = gaussian_tail(dc.k_plus * ratio);
    }
    r.bound_guaranteed = ens.delta < dc.delta_plus;

    for (std::size_t i = 0; i < T; ++i) {
        if (r.per_cycle[i].freq > r.bound + 3.0 * r.per_cycle[i].se) r.dominance_ok = false;
        if (r.early[i].freq > r.bound_early + 3.0 * r.early[i].se) r.split_dominance_ok = false;
        if (r.bound_guaranteed && r.late[i].freq > r.bound_late + 3.0 * r.late[i].se) r.split_dominance_ok = false;
    }
    return r;
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

DistanceMomentReport summarize_distance(const McConfig& cfg, const Ensemble& ens) {
    DistanceMomentReport r;
    r.epsilon = ens.eps;
    r.horizon = ens.horizon;
    r.delta = ens.delta;
    r.p = cfg.p;
    r.replicas = ens.outcomes.size();
    const double n = static_cast<double>(r.replicas);

    std::vector<double> ds;
    ds.reserve(r.replicas);
    double sum = 0.0, sum2 = 0.0, sum_p = 0.0, sum_p2 = 0.0;
    std::size_t good = 0;
    for (const auto& o : ens.outcomes) {
        ds.push_back(o.d);
        sum += o.d;
        sum2 += o.d * o.d;
        const double dp = std::pow(o.d, cfg.p);
        sum_p += dp;
        sum_p2 += dp * dp;
        if (o.first_bad == 0) ++good;
        if (o.slow) ++r.anomalies;
        if (o.aligned_used) ++r.aligned_used;
        if (o.lemma_checked) {
            ++r.lemma_checked;
            if (!o.gamma_ok) ++r.gamma_lemma_violations;
            if (!o.modes_ok) ++r.mode_alignment_violations;
        }
    }
    r.mean_d = sum / n;
    r.moment = sum_p / n;
    if (r.replicas > 1) {
        r.se_d = std::sqrt(std::max(0.0, (sum2 - n * r.mean_d * r.mean_d) / (n - 1.0)) / n);
        r.moment_se = std::sqrt(std::max(0.0, (sum_p2 - n * r.moment * r.moment) / (n - 1.0)) / n);
    }
    std::sort(ds.begin(), ds.end());
    r.q90 = quantile(ds, 0.90);
    r.q99 = quantile(ds, 0.99);
    r.max_d = ds.empty() ? 0.0 : ds.back();
    r.good_freq = static_cast<double>(good) / n;
    return r;
}

} // namespace

BadEventReport bad_event_probs(const ConverterParams& p, const DerivedConstants& dc, const McConfig& cfg, double eps) {
    return summarize_events(dc, run_ensemble(p, dc, cfg, eps, false));
}

DistanceMomentReport distance_moment(const ConverterParams& p, const DerivedConstants& dc, const McConfig& cfg,
                                     double eps) {
    return summarize_distance(cfg, run_ensemble(p, dc, cfg, eps, true));
}

McReport sweep(const ConverterParams& p, const McConfig& cfg) {
    cfg.validate();
    const DerivedConstants dc = derive_constants(p);
    McReport report;
    report.config = cfg;
    for (double eps : cfg.epsilons) {
        const Ensemble ens = run_ensemble(p, dc, cfg, eps, true);
        report.rows.push_back({summarize_events(dc, ens), summarize_distance(cfg, ens)});
    }
    return report;
}

std::string report_csv(const McReport& report) {
    std::string out = "epsilon,T_eps,delta,n,emp_prob,wilson_lo,wilson_hi,bound,emp_d_mean,emp_dp_moment,dp_se,"
                      "good_freq,anomalies\n";
    for (const auto& row : report.rows) {
        const auto& ev = row.events;
        const auto& d = row.distance;
        const std::string eps = format_double(ev.epsilon);
        const std::string T = std::to_string(ev.horizon);
        const std::string delta = format_double(ev.delta);
        const std::string mean = format_double(d.mean_d);
        const std::string moment = format_double(d.moment);
        const std::string se = format_double(d.moment_se);
        const std::string good = format_double(ev.good_freq);
        const std::string anomalies = std::to_string(ev.anomalies);
        for (std::size_t i = 0; i < ev.per_cycle.size(); ++i) {
            const auto& f = ev.per_cycle[i];
            out += csv_row({eps, T, delta, std::to_string(i + 1), format_double(f.freq), format_double(f.wilson.lo),
                            format_double(f.wilson.hi), format_double(ev.bound), mean, moment, se, good, anomalies});
        }
        // The pooled event is a disjoint union over n, so its bound is the sum of the per-cycle bounds.
        const auto& f = ev.pooled;
        out += csv_row({eps, T, delta, "pooled", format_double(f.freq), format_double(f.wilson.lo),
                        format_double(f.wilson.hi), format_double(ev.horizon * ev.bound), mean, moment, se, good,
                        anomalies});
    }
    return out;
}

bool report_checks_pass(const McReport& report) {
    for (const auto& row : report.rows) {
        // The early-switch bound holds for every delta; the others need delta < delta_plus,
        // and split_dominance_ok already skips the late bound otherwise.
        if (!row.events.split_dominance_ok) return false;
        if (row.events.bound_guaranteed && !row.events.dominance_ok) return false;
        if (row.distance.gamma_lemma_violations > 0 || row.distance.mode_alignment_violations > 0) return false;
    }
    return true;
}

std::string report_summary_json(const McReport& report) {
    using nlohmann::json;
    const auto& c = report.config;
    json j;
    j["config"] = {{"epsilons", c.epsilons}, {"nu", c.nu},       {"varsigma", c.varsigma},
                   {"horizon_scale", c.horizon_scale},  {"p", c.p},         {"replicas", c.replicas},
                   {"seed", c.seed},                    {"dt", c.dt},       {"bridge_correction", c.bridge_correction}};
    json rows = json::array();
    for (const auto& row : report.rows) {
        const auto& ev = row.events;
        const auto& d = row.distance;
        json split = json::array();
        for (std::size_t i = 0; i < ev.per_cycle.size(); ++i) {
            split.push_back({{"n", i + 1}, {"early", ev.early[i].freq}, {"late", ev.late[i].freq}});
        }
        rows.push_back({
            {"epsilon", ev.epsilon},
            {"T_eps", ev.horizon},
            {"delta", ev.delta},
            {"bound", ev.bound},
            {"bound_early", ev.bound_early},
            {"bound_late", ev.bound_late},
            {"bound_guaranteed", ev.bound_guaranteed},
            {"pooled_bad_freq", ev.pooled.freq},
            {"good_freq", ev.good_freq},
            {"anomalies", ev.anomalies},
            {"split", split},
            {"checks",
             {{"bad_event_dominance", ev.dominance_ok},
              {"split_dominance", ev.split_dominance_ok},
              {"gamma_lemma", d.gamma_lemma_violations == 0},
              {"mode_alignment", d.mode_alignment_violations == 0}}},
            {"distance",
             {{"mean", d.mean_d},
              {"se", d.se_d},
              {"moment", d.moment},
              {"moment_se", d.moment_se},
              {"q90", d.q90},
              {"q99", d.q99},
              {"max", d.max_d},
              {"aligned_used", d.aligned_used},
              {"lemma_checked", d.lemma_checked}}},
        });
    }
    j["rows"] = rows;
    j["all_checks_pass"] = report_checks_pass(report);
    return j.dump(2) + "\n";
}

} // namespace bucksim
