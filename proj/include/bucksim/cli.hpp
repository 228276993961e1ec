#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "bucksim/config.hpp"
#include "bucksim/model_params.hpp"

namespace bucksim {

enum class Command { Validate, Strobe, SimulateDet, SimulateSde, Distance, McSweep };

Command parse_command(std::string_view name);
std::string_view command_name(Command c);

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitDomain = 3, kExitInternal = 4 };

struct RunConfig {
    Command command = Command::Validate;
    KeyValueConfig values;  // file contents with --seed / --set overrides applied
    std::filesystem::path out_dir = ".";
    bool quiet = false;
};

// Model parameters from `alpha_on`, `alpha_off`, `beta`, `x_ref` (reference
// set for missing keys).
ConverterParams params_from_config(const KeyValueConfig& values);

// Dispatches to the owning module and writes the declared outputs into
// cfg.out_dir. Returns an ExitCode; diagnostics go to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full command-line entry point: `bucksim <command> [--config PATH] [--out DIR]
// [--seed N] [--set key=value]... [--quiet]`.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace bucksim
