// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "../instances.hpp"
#include "../oracles.hpp"
#include "bucksim/cli.hpp"
#include "bucksim/det_engine.hpp"
#include "bucksim/flln_mc.hpp"
#include "bucksim/model_params.hpp"
#include "bucksim/rng.hpp"
#include "bucksim/sde_engine.hpp"
#include "bucksim/skorokhod.hpp"
#include "bucksim/strobe_map.hpp"

using namespace bucksim;

namespace {

const ConverterParams P0 = reference_params();

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;
    std::function<Outcome()> body;
};

Outcome parameter_gate() {
    if (!validate_params(P0).ok()) return {false, "reference parameters rejected"};
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
    int named = 0;
    std::string missed;
    for (const auto& c : cases) {
        ConverterParams p = P0;
        p.*(c.field) = c.value;
        if (validate_params(p).violates(c.name)) {
            ++named;
        } else {
            missed += std::string(" ") + c.name;
        }
    }
    return {named == 6, fmt::format("{}/6 perturbations named{}", named, missed)};
}

Outcome fixed_point() {
    const auto fp = find_fixed_point(P0);
    const auto orbit = cobweb(P0, 0.1, 200);
    const double gap = std::abs(orbit.back() - fp.x_star);
    const double xb = x_border(P0);
    const double xs_oracle = oracle::fixed_point({});
    const double slope_oracle =
        std::abs(oracle::central_difference([](double x) { return oracle::strobe({}, x); }, xs_oracle));
    const bool ok = gap <= 1e-9 && fp.x_star > xb && fp.x_star < P0.x_ref && std::abs(fp.f_prime_at_star) < 1.0 &&
                    std::abs(fp.x_star - 0.695) <= 0.001 && std::abs(std::abs(fp.f_prime_at_star) - 0.489) <= 0.002 &&
                    std::abs(fp.x_star - xs_oracle) <= 1e-9 &&
                    std::abs(std::abs(fp.f_prime_at_star) - slope_oracle) <= 1e-6;
    return {ok, fmt::format("x* = {:.12f}, |f'(x*)| = {:.12f}, iteration gap {:.2e}", fp.x_star,
                            std::abs(fp.f_prime_at_star), gap)};
}

Outcome periodic_orbit() {
    const auto dc = derive_constants(P0);
    const auto path = simulate_det(P0, {dc.x_star, 1}, 100);
    const auto& cycles = path.schedule().cycles;
    if (cycles.size() != 100) return {false, fmt::format("{} cycles instead of 100", cycles.size())};
    double worst_t = 0.0;
    bool pulses_ok = true;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        if (!cycles[i].complete()) return {false, fmt::format("cycle {} incomplete", i + 1)};
        worst_t = std::max(worst_t, std::abs(*cycles[i].off_time - (n - 1.0) - dc.t_star));
        pulses_ok = pulses_ok && *cycles[i].next_on == n;
    }
    double worst_x = 0.0;
    for (long k = 0; k <= 99000; ++k) {
        const double t = static_cast<double>(k) * 1e-3;
        worst_x = std::max(worst_x, std::abs(path.at(t + 1.0).x - path.at(t).x));
    }
    return {worst_t <= 1e-9 && pulses_ok && worst_x <= 1e-9,
            fmt::format("max |t_n - (n-1) - t*| = {:.2e}, s_n = n: {}, max |x(t+1) - x(t)| = {:.2e}", worst_t,
                        pulses_ok ? "yes" : "no", worst_x)};
}

Outcome ou_marginals() {
    const double x0 = 0.4;
    const int draws = 100000;
    bool ok = true;
    std::string detail;
    Engine rng(stream_seed(2024, 0));
    std::normal_distribution<double> n01;
    for (auto [h, eps] : {std::pair{0.1, 0.05}, std::pair{0.01, 0.05}, std::pair{0.1, 0.2}}) {
        const double eq = P0.beta / P0.alpha_on;
        const double mean = eq + (x0 - eq) * std::exp(-P0.alpha_on * h);
        const double var = eps * eps * (1.0 - std::exp(-2.0 * P0.alpha_on * h)) / (2.0 * P0.alpha_on);
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < draws; ++i) {
            const double x = ou_step(P0, x0, h, eps, n01(rng));
            s += x;
            s2 += x * x;
        }
        const double m = s / draws;
        const double v = (s2 - draws * m * m) / (draws - 1);
        const double z = std::abs(m - mean) / std::sqrt(var / draws);
        const double rel = std::abs(v / var - 1.0);
        ok = ok && z <= 3.0 && rel <= 0.05;
        detail += fmt::format("(h={}, eps={}): mean {:.2f} SE, var {:.2f}%; ", h, eps, z, 100 * rel);
    }
    return {ok, detail};
}

Outcome zero_noise() {
    const auto dc = derive_constants(P0);
    StochConfig cfg;
    cfg.epsilon = 0.0;
    cfg.dt = 1e-3;
    cfg.horizon = 20;
    const auto det = simulate_det(P0, {dc.x_star, 1}, 20);
    const auto sto = simulate_stoch(P0, {dc.x_star, 1}, cfg);
    const auto& a = det.schedule().cycles;
    const auto& b = sto.schedule().cycles;
    if (a.size() != b.size()) return {false, fmt::format("cycle counts {} vs {}", a.size(), b.size())};
    double worst = 0.0;
    bool pulses = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!b[i].off_time) return {false, fmt::format("no switch in cycle {}", i + 1)};
        worst = std::max(worst, std::abs(*b[i].off_time - *a[i].off_time));
        pulses = pulses && b[i].next_on == a[i].next_on;
    }
    return {worst <= cfg.dt && pulses, fmt::format("max |tau_n - t_n| = {:.3e} over {} cycles", worst, a.size())};
}

Outcome tail_bound() {
    bool ok = true;
    double worst_ratio = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double x = 1.0 + 0.5 * i;
        const double ratio = gaussian_tail(x) / gaussian_tail_estimate(x);
        worst_ratio = std::max(worst_ratio, ratio);
        ok = ok && ratio <= 1.0;
    }
    const double q = gaussian_tail(1.959964);
    ok = ok && std::abs(q - 0.025) <= 1e-6;
    return {ok, fmt::format("max tail/estimate = {:.4f}, T(1.959964) = {:.9f}", worst_ratio, q)};
}

Outcome deformation_lemma() {
    const auto dc = derive_constants(P0);
    const int T = 10;
    const double delta = dc.t_min / (4.0 * T);
    const double limit = 4.0 * T * delta / dc.t_min;
    const auto det = simulate_det(P0, {dc.x_star, 1}, T);
    std::mt19937_64 rng(stream_seed(7, 0));
    int violations = 0;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const auto moved = instances::shifted_schedule(det.schedule(), instances::random_shifts(rng, T, delta));
        const auto lam = paper_lambda(det.schedule(), moved, T);
        if (!lam) return {false, "no aligned deformation for a valid schedule"};
        worst = std::max(worst, gamma(*lam));
        violations += gamma(*lam) > limit;
    }
    return {violations == 0, fmt::format("max gamma = {:.4f} vs 4 T delta / t_min = {:.4f}", worst, limit)};
}

Outcome bad_event_bound() {
    const auto dc = derive_constants(P0);
    bool ok = true;
    std::string detail;
    for (double eps : {0.05, 0.01, 0.002}) {
        McConfig cfg;
        cfg.epsilons = {eps};
        cfg.nu = 0.0;
        cfg.varsigma = 0.8;
        cfg.horizon_scale = 10;
        cfg.replicas = 10000;
        cfg.seed = 42;
        cfg.threads = 0;
        const auto ev = bad_event_probs(P0, dc, cfg, eps);
        double worst_margin = -1.0;
        for (const auto& f : ev.per_cycle) {
            const double margin = f.freq - (ev.bound + 3.0 * f.se);
            worst_margin = std::max(worst_margin, margin);
        }
        const bool row_ok = ev.bound_guaranteed && ev.per_cycle.size() == 10 && worst_margin <= 0.0;
        ok = ok && row_ok;
        double max_freq = 0.0;
        for (const auto& f : ev.per_cycle) max_freq = std::max(max_freq, f.freq);
        detail += fmt::format("eps={}: delta={:.4f}, max P(B_n)={:.4f}, bound={:.4f}; ", eps, ev.delta, max_freq,
                              ev.bound);
    }
    return {ok, detail};
}

McConfig flln_config() {
    McConfig cfg;
    cfg.epsilons = {0.1, 0.05, 0.02};
    cfg.nu = 0.0;
    cfg.varsigma = 0.8;
    cfg.horizon_scale = 10;
    cfg.p = 1.0;
    cfg.replicas = 1000;
    cfg.seed = 42;
    cfg.threads = 0;
    return cfg;
}

Outcome flln_decay() {
    const auto report = sweep(P0, flln_config());
    std::vector<double> m;
    for (const auto& row : report.rows) m.push_back(row.distance.moment);
    const bool ok = m.size() == 3 && m[0] > m[1] && m[1] > m[2] && m[2] <= 0.5 * m[0];
    return {ok, fmt::format("E[d] bounds: {:.5f} (0.1), {:.5f} (0.05), {:.5f} (0.02)", m[0], m[1], m[2])};
}

Outcome skorokhod_oracle() {
    const auto dc = derive_constants(P0);
    struct Instance {
        double x0;
        std::vector<double> shift;
    };
    const Instance cases[] = {
        {dc.x_star, {0.02, 0.02}},  {dc.x_star, {0.05, -0.05}}, {0.5, {-0.02, 0.05}},
        {0.8, {0.05, 0.02}},        {dc.x_star, {-0.05, -0.02}},
    };
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        const auto pair = instances::make_pair(P0, c.x0, 2, c.shift, 0.002);
        const auto lam = paper_lambda(pair.det->schedule(), pair.moved_schedule, 2);
        if (!lam) return {false, "no aligned deformation"};
        const double aligned = sk_upper_bound(*pair.det, *pair.moved, *lam).bound;
        const double brute = sk_bruteforce(*pair.det, *pair.moved).bound;
        const double uni = uniform_distance(*pair.det, *pair.moved).bound;
        const bool case_ok = std::abs(aligned - brute) <= 0.05 * brute && aligned <= uni && brute <= uni;
        ok = ok && case_ok;
        detail += fmt::format("[{:.4f} / {:.4f} / {:.3f}] ", aligned, brute, uni);
    }
    const auto det = simulate_det(P0, {dc.x_star, 1}, 2);
    const double same_uni = uniform_distance(det, det).bound;
    const double same_aligned = sk_upper_bound(det, det, *paper_lambda(det.schedule(), det.schedule(), 2)).bound;
    const double same_brute = sk_bruteforce(det, det).bound;
    ok = ok && same_uni == 0.0 && same_aligned == 0.0 && same_brute == 0.0;
    return {ok, detail + fmt::format("identical: {} / {} / {}", same_aligned, same_brute, same_uni)};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const auto base = std::filesystem::temp_directory_path() / "bucksim_acceptance_determinism";
    std::filesystem::remove_all(base);
    std::vector<std::string> outputs;
    for (unsigned threads : {1u, 4u}) {
        RunConfig cfg;
        cfg.command = Command::McSweep;
        cfg.values.set("mc.epsilons", "0.1,0.05,0.02");
        cfg.values.set("mc.nu", "0");
        cfg.values.set("mc.horizon_scale", "10");
        cfg.values.set("mc.p", "1");
        cfg.values.set("mc.replicas", "1000");
        cfg.values.set("seed", "42");
        cfg.values.set("threads", std::to_string(threads));
        cfg.out_dir = base / fmt::format("threads_{}", threads);
        cfg.quiet = true;
        std::ostringstream out, err;
        if (run(cfg, out, err) != kExitOk) return {false, "mc-sweep failed: " + err.str()};
        outputs.push_back(read_file(cfg.out_dir / "mc_report.csv"));
    }
    const bool same = outputs[0] == outputs[1] && !outputs[0].empty();
    return {same, fmt::format("{} bytes, threads 1 vs 4 {}", outputs[0].size(), same ? "identical" : "differ")};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "parameter gate", 1.0, parameter_gate},
        {2, "fixed point and stability", 1.0, fixed_point},
        {3, "periodic orbit", 1.0, periodic_orbit},
        {4, "exact OU marginals", 10.0, ou_marginals},
        {5, "zero-noise degeneration", 5.0, zero_noise},
        {6, "Gaussian tail bound", 1.0, tail_bound},
        {7, "time-deformation lemma", 5.0, deformation_lemma},
        {8, "bad-event bound", 600.0, bad_event_bound},
        {9, "FLLN decay", 600.0, flln_decay},
        {10, "Skorokhod oracle agreement", 60.0, skorokhod_oracle},
        {11, "determinism across thread counts", 1200.0, determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.time_limit_s;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("%s %2d %s: %s [%.2f s / limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), secs, c.time_limit_s, in_time ? "" : ", too slow");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
