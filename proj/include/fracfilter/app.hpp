#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracfilter/entropy.hpp"
#include "fracfilter/io.hpp"
#include "fracfilter/metrics.hpp"
#include "fracfilter/spectral.hpp"
#include "fracfilter/synth.hpp"

namespace CLI {
class App;
}

namespace fracfilter::app {

inline constexpr const char* kToolName = "fracfilter";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    kSuccess = 0,
    kInvalidArguments = 2,
    kIoFailure = 3,
    kNumericalFailure = 4,
};

struct RunConfig {
    std::string command;
    std::filesystem::path in;
    std::filesystem::path out;
    std::filesystem::path reference;  // optional clean signal/image for error metrics

    double alpha = 2.2;
    double lambda = 100.0;
    std::string alpha_grid = "1.0,1.4,1.8,2.2,2.6,3.0,3.4";
    std::string lambda_grid = "1e-2,1e-1,1,1e1,1e2,1e3,1e4";
    std::string window = "760:825";
    unsigned threads = 1;

    // simulate
    std::uint64_t seed = 42;
    std::optional<double> sigma;  // default 0.02 for spectra, 0.1 for images
    double mu = 0.0;
    double grid_start = 700.0;
    double grid_step = 0.25;
    long points = 800;
    double baseline = 0.0;
    std::vector<std::string> peaks;  // "center:amplitude:gamma:eta"; empty = default two-peak recipe, "none" = no peaks
    bool image = false;
    long size = 256;

    // metrics
    bool single = false;  // metric,value rows for the input itself instead of a sweep
};

/// Parses "lo:hi".
PeakWindow<double> parse_window(const std::string& text);

/// Comma-separated values, or an inclusive linear range "start:step:stop".
std::vector<double> parse_grid_values(const std::string& text, const std::string& what);

ParamGrid<double> parse_param_grid(const RunConfig& config);
SimulationRecipe<double> recipe_from(const RunConfig& config);

/// Registers every flag on `cli`, writing into `config`.
void bind_cli(CLI::App& cli, RunConfig& config);

/// Builds the argument list CLI11 sees: entries from a `--config PATH` file are
/// turned into `--key=value` arguments placed before the real ones, so explicit
/// flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

/// Parses arguments (argv[0] excluded), validates, and returns the config.
RunConfig parse_args(const std::vector<std::string>& args);

void cmd_simulate(const RunConfig& config, std::ostream& log);
void cmd_filter1d(const RunConfig& config, std::ostream& log);
void cmd_filter2d(const RunConfig& config, std::ostream& log);
void cmd_optimize(const RunConfig& config, std::ostream& log);
void cmd_metrics(const RunConfig& config, std::ostream& log);

void run(const RunConfig& config, std::ostream& log);

int exit_code_for(const std::exception& e);

/// Whole CLI: parse, run, report errors to `err`, return the exit code.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fracfilter::app
