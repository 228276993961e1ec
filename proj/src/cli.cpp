#include "bucksim/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "bucksim/det_engine.hpp"
#include "bucksim/errors.hpp"
#include "bucksim/flln_mc.hpp"
#include "bucksim/parallel.hpp"
#include "bucksim/report_io.hpp"
#include "bucksim/sde_engine.hpp"
#include "bucksim/skorokhod.hpp"
#include "bucksim/strobe_map.hpp"

namespace bucksim {

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 6> kCommands{{
    {Command::Validate, "validate"},
    {Command::Strobe, "strobe"},
    {Command::SimulateDet, "simulate-det"},
    {Command::SimulateSde, "simulate-sde"},
    {Command::Distance, "distance"},
    {Command::McSweep, "mc-sweep"},
}};

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "alpha_on",          "alpha_off",      "beta",           "x_ref",
        "seed",              "threads",        "strobe.x0",      "strobe.iterations",
        "det.x0",            "det.y0",         "det.horizon",    "det.sample_step",
        "sde.x0",            "sde.epsilon",    "sde.dt",         "sde.horizon",
        "sde.replicas",      "sde.bridge_correction",            "sde.write_trajectories",
        "distance.replica",  "distance.grid_step",               "distance.bruteforce",
        "mc.epsilons",       "mc.nu",          "mc.varsigma",    "mc.horizon_scale",
        "mc.p",              "mc.replicas",    "mc.dt",          "mc.bridge_correction",
    };
    return keys;
}

void reject_unknown_keys(const KeyValueConfig& values) {
    for (const auto& k : values.keys()) {
        if (!known_keys().count(k)) throw ConfigError("unknown config key '" + k + "'");
    }
}

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

StochConfig stoch_config(const KeyValueConfig& v) {
    StochConfig sc;
    sc.epsilon = v.get_double("sde.epsilon", sc.epsilon);
    sc.dt = v.get_double("sde.dt", sc.dt);
    sc.horizon = static_cast<int>(v.get_int("sde.horizon", sc.horizon));
    sc.seed = v.get_u64("seed", sc.seed);
    sc.bridge_correction = v.get_bool("sde.bridge_correction", sc.bridge_correction);
    if (sc.horizon < 0) throw ConfigError("sde.horizon must be >= 0");
    if (!(sc.epsilon >= 0.0)) throw ConfigError("sde.epsilon must be >= 0");
    steps_per_unit(sc.dt);
    return sc;
}

unsigned thread_count(const KeyValueConfig& v) {
    const long t = v.get_int("threads", 0);
    if (t < 0) throw ConfigError("threads must be >= 0");
    return static_cast<unsigned>(t);
}

std::string derived_text(const ConverterParams& p, const DerivedConstants& dc) {
    std::string s;
    auto line = [&](std::string_view k, double v) { s += fmt::format("{} = {}\n", k, format_double(v)); };
    line("alpha_on", p.alpha_on);
    line("alpha_off", p.alpha_off);
    line("beta", p.beta);
    line("x_ref", p.x_ref);
    line("x_border", dc.x_border);
    line("x_star", dc.x_star);
    line("t_star", dc.t_star);
    line("t_on", dc.t_on);
    line("t_off", dc.t_off);
    line("t_min", dc.t_min);
    line("mu", dc.mu);
    line("k_minus", dc.k_minus);
    line("k_plus", dc.k_plus);
    line("k", dc.k);
    line("delta_plus", dc.delta_plus);
    line("f_prime_at_star", dc.f_prime_at_star);
    return s;
}

int cmd_validate(const RunConfig& cfg, const ConverterParams& p, std::ostream& out, std::ostream& err) {
    const auto validation = validate_params(p);
    if (!validation.ok()) {
        err << "domain error: parameters violate the standing assumptions: " << validation.describe() << "\n";
        return kExitDomain;
    }
    const auto dc = derive_constants(p);
    const std::string text = derived_text(p, dc);
    nlohmann::json j = {{"x_border", dc.x_border}, {"x_star", dc.x_star},       {"t_star", dc.t_star},
                        {"t_on", dc.t_on},         {"t_off", dc.t_off},         {"t_min", dc.t_min},
                        {"mu", dc.mu},             {"k_minus", dc.k_minus},     {"k_plus", dc.k_plus},
                        {"k", dc.k},               {"delta_plus", dc.delta_plus}, {"f_prime_at_star", dc.f_prime_at_star}};
    atomic_write(cfg.out_dir / "derived_constants.txt", text);
    atomic_write(cfg.out_dir / "derived_constants.json", j.dump(2) + "\n");
    if (!cfg.quiet) out << "parameters ok\n" << text;
    return kExitOk;
}

int cmd_strobe(const RunConfig& cfg, const ConverterParams& p, std::ostream& out) {
    const auto dc = derive_constants(p);
    const double x0 = cfg.values.get_double("strobe.x0", 0.1);
    const long iterations = cfg.values.get_int("strobe.iterations", 50);
    if (iterations < 0) throw ConfigError("strobe.iterations must be >= 0");
    const auto xs = cobweb(p, x0, static_cast<std::size_t>(iterations));

    std::string csv = "iter,x\n";
    for (std::size_t i = 0; i < xs.size(); ++i) csv += csv_row({std::to_string(i), format_double(xs[i])});
    nlohmann::json j = {{"x_star", dc.x_star}, {"f_prime_at_star", dc.f_prime_at_star}, {"x_border", dc.x_border},
                        {"x0", x0},            {"iterations", iterations}};
    atomic_write(cfg.out_dir / "strobe_cobweb.csv", csv);
    atomic_write(cfg.out_dir / "strobe_summary.json", j.dump(2) + "\n");
    if (!cfg.quiet) {
        out << fmt::format("x_star = {} f'(x_star) = {} x_border = {} ({} iterates)\n", format_double(dc.x_star),
                           format_double(dc.f_prime_at_star), format_double(dc.x_border), iterations);
    }
    return kExitOk;
}

std::string schedule_csv(const Schedule& s) {
    std::string csv = "n,t_n,s_n\n";
    for (std::size_t i = 0; i < s.cycles.size(); ++i) {
        csv += csv_row({std::to_string(i + 1), opt_field(s.cycles[i].off_time), opt_field(s.cycles[i].next_on)});
    }
    return csv;
}

int cmd_simulate_det(const RunConfig& cfg, const ConverterParams& p, std::ostream& out) {
    const auto dc = derive_constants(p);
    const double x0 = cfg.values.get_double("det.x0", dc.x_star);
    const long y0 = cfg.values.get_int("det.y0", 1);
    const long horizon = cfg.values.get_int("det.horizon", 10);
    const double step = cfg.values.get_double("det.sample_step", 1e-3);
    if (y0 != 0 && y0 != 1) throw ConfigError("det.y0 must be 0 or 1");
    if (horizon < 0) throw ConfigError("det.horizon must be >= 0");
    if (!(step > 0.0)) throw ConfigError("det.sample_step must be > 0");

    const DetPath path = simulate_det(p, {x0, static_cast<int>(y0)}, static_cast<int>(horizon));
    std::string traj = "t,x,y\n";
    const double T = path.horizon();
    const auto samples = static_cast<long>(std::ceil(T / step - 1e-9));
    for (long k = 0; k <= samples; ++k) {
        const double t = k == samples ? T : static_cast<double>(k) * step;
        const auto z = path.at(t);
        traj += csv_row({format_double(t), format_double(z.x), std::to_string(z.y)});
    }
    atomic_write(cfg.out_dir / "det_trajectory.csv", traj);
    atomic_write(cfg.out_dir / "det_schedule.csv", schedule_csv(path.schedule()));
    if (!cfg.quiet) {
        out << fmt::format("deterministic path on [0, {}]: {} cycles ({} complete)\n", horizon,
                           path.schedule().cycles.size(), path.schedule().complete_cycles());
    }
    return kExitOk;
}

int cmd_simulate_sde(const RunConfig& cfg, const ConverterParams& p, std::ostream& out) {
    const auto dc = derive_constants(p);
    const StochConfig sc = stoch_config(cfg.values);
    const double x0 = cfg.values.get_double("sde.x0", dc.x_star);
    const long replicas = cfg.values.get_int("sde.replicas", 1);
    const bool write_traj = cfg.values.get_bool("sde.write_trajectories", false);
    if (replicas < 1) throw ConfigError("sde.replicas must be >= 1");

    std::vector<std::string> schedules(static_cast<std::size_t>(replicas));
    std::vector<std::string> trajectories(write_traj ? schedules.size() : 0);
    parallel_for(schedules.size(), thread_count(cfg.values), [&](std::size_t k) {
        const StochPath path = simulate_stoch(p, {x0, 1}, sc, k);
        std::string rows;
        const auto& cycles = path.schedule().cycles;
        for (std::size_t n = 0; n < cycles.size(); ++n) {
            rows += csv_row({std::to_string(k), std::to_string(n + 1), opt_field(cycles[n].off_time),
                             opt_field(cycles[n].next_on)});
        }
        schedules[k] = std::move(rows);
        if (write_traj) {
            std::string traj = "t,x,y\n";
            for (std::size_t i = 0; i < path.grid_size(); ++i) {
                traj += csv_row({format_double(path.grid_time(i)), format_double(path.grid_x()[i]),
                                 std::to_string(path.grid_y()[i])});
            }
            trajectories[k] = std::move(traj);
        }
    });

    std::string csv = "replica,n,tau_n,sigma_n\n";
    for (const auto& s : schedules) csv += s;
    atomic_write(cfg.out_dir / "sde_schedule.csv", csv);
    for (std::size_t k = 0; k < trajectories.size(); ++k) {
        atomic_write(cfg.out_dir / fmt::format("sde_trajectory_{}.csv", k), trajectories[k]);
    }
    if (!cfg.quiet) {
        out << fmt::format("simulated {} replica(s) on [0, {}] with epsilon = {}, dt = {}\n", replicas, sc.horizon,
                           sc.epsilon, sc.dt);
    }
    return kExitOk;
}

int cmd_distance(const RunConfig& cfg, const ConverterParams& p, std::ostream& out) {
    const auto dc = derive_constants(p);
    const StochConfig sc = stoch_config(cfg.values);
    if (sc.horizon < 1) throw ConfigError("distance needs sde.horizon >= 1");
    const double x0 = cfg.values.get_double("sde.x0", dc.x_star);
    const auto replica = cfg.values.get_u64("distance.replica", 0);
    const double grid = cfg.values.get_double("distance.grid_step", 1e-3);
    const bool brute = cfg.values.get_bool("distance.bruteforce", false);

    const DetPath det = simulate_det(p, {x0, 1}, sc.horizon);
    const StochPath stoch = simulate_stoch(p, {x0, 1}, sc, replica);

    std::vector<DistanceBound> rows;
    rows.push_back(uniform_distance(det, stoch, grid));
    if (auto lam = paper_lambda(det.schedule(), stoch.schedule(), sc.horizon)) {
        rows.push_back(sk_upper_bound(det, stoch, *lam, grid, "paper_lambda"));
    }
    if (brute) {
        BruteForceOptions opts;
        opts.grid_step = grid;
        rows.push_back(sk_bruteforce(det, stoch, opts));
    }

    std::string csv = "gamma,sup_r,bound,method\n";
    for (const auto& r : rows) {
        csv += csv_row({format_double(r.gamma), format_double(r.sup_r), format_double(r.bound), r.method});
    }
    atomic_write(cfg.out_dir / "distance.csv", csv);
    if (!cfg.quiet) {
        const auto best = std::min_element(rows.begin(), rows.end(),
                                           [](const auto& a, const auto& b) { return a.bound < b.bound; });
        out << fmt::format("Skorokhod distance <= {} ({})\n", format_double(best->bound), best->method);
    }
    return kExitOk;
}

int cmd_mc_sweep(const RunConfig& cfg, const ConverterParams& p, std::ostream& out) {
    const auto& v = cfg.values;
    McConfig mc;
    mc.epsilons = v.get_double_list("mc.epsilons", {0.1, 0.05, 0.02});
    mc.nu = v.get_double("mc.nu", mc.nu);
    mc.varsigma = v.get_double("mc.varsigma", mc.varsigma);
    mc.horizon_scale = static_cast<int>(v.get_int("mc.horizon_scale", mc.horizon_scale));
    mc.p = v.get_double("mc.p", mc.p);
    const long replicas = v.get_int("mc.replicas", static_cast<long>(mc.replicas));
    if (replicas < 1) throw ConfigError("mc.replicas must be >= 1");
    mc.replicas = static_cast<std::size_t>(replicas);
    mc.seed = v.get_u64("seed", mc.seed);
    mc.dt = v.get_double("mc.dt", mc.dt);
    mc.bridge_correction = v.get_bool("mc.bridge_correction", mc.bridge_correction);
    mc.threads = thread_count(v);
    mc.validate();

    const McReport report = sweep(p, mc);
    atomic_write(cfg.out_dir / "mc_report.csv", report_csv(report));
    atomic_write(cfg.out_dir / "mc_summary.json", report_summary_json(report));
    if (!cfg.quiet) {
        out << fmt::format("mc-sweep: {} epsilon value(s), {} replicas each, checks {}\n", report.rows.size(),
                           mc.replicas, report_checks_pass(report) ? "passed" : "FAILED");
    }
    return kExitOk;
}

} // namespace

Command parse_command(std::string_view name) {
    for (const auto& [c, n] : kCommands) {
        if (n == name) return c;
    }
    throw ConfigError(fmt::format("unknown subcommand '{}'", name));
}

std::string_view command_name(Command c) {
    for (const auto& [cmd, n] : kCommands) {
        if (cmd == c) return n;
    }
    return "?";
}

ConverterParams params_from_config(const KeyValueConfig& values) {
    ConverterParams p = reference_params();
    p.alpha_on = values.get_double("alpha_on", p.alpha_on);
    p.alpha_off = values.get_double("alpha_off", p.alpha_off);
    p.beta = values.get_double("beta", p.beta);
    p.x_ref = values.get_double("x_ref", p.x_ref);
    return p;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        reject_unknown_keys(cfg.values);
        std::error_code ec;
        std::filesystem::create_directories(cfg.out_dir, ec);
        if (ec || !std::filesystem::is_directory(cfg.out_dir)) {
            throw ConfigError("output directory is not usable: " + cfg.out_dir.string());
        }
        const ConverterParams p = params_from_config(cfg.values);
        if (cfg.command == Command::Validate) return cmd_validate(cfg, p, out, err);

        const auto validation = validate_params(p);
        if (!validation.ok()) throw DomainError("invalid converter parameters: " + validation.describe());
        switch (cfg.command) {
            case Command::Strobe: return cmd_strobe(cfg, p, out);
            case Command::SimulateDet: return cmd_simulate_det(cfg, p, out);
            case Command::SimulateSde: return cmd_simulate_sde(cfg, p, out);
            case Command::Distance: return cmd_distance(cfg, p, out);
            case Command::McSweep: return cmd_mc_sweep(cfg, p, out);
            case Command::Validate: break;
        }
        throw InternalError("unhandled subcommand");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulation and verification of a randomly perturbed buck converter"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    bool quiet = false;
    app.add_option("--config", config_path, "flat key = value config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "base seed for all randomness");
    app.add_option("--set", overrides, "override a config key (key=value), repeatable");
    app.add_flag("--quiet", quiet, "suppress the summary line");
    for (const auto& [cmd, name] : kCommands) app.add_subcommand(std::string(name))->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    RunConfig cfg;
    try {
        cfg.command = parse_command(app.get_subcommands().front()->get_name());
        if (!config_path.empty()) cfg.values = KeyValueConfig::load(config_path);
        if (seed) cfg.values.set("seed", std::to_string(*seed));
        for (const auto& o : overrides) cfg.values.apply_override(o);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    cfg.out_dir = out_dir;
    cfg.quiet = quiet;
    return run(cfg, out, err);
}

} // namespace bucksim
