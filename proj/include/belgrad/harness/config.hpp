#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace belgrad::harness {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct ExperimentConfig {
  std::string command;  // check-hypotheses, simulate, gradient, moment-audit, ratio-sweep, counterexample, all
  std::string model = "ou";
  double theta = 0.9;
  int n_max = 160;                 // counterexample tables run over [n0, n_max]
  std::vector<int> levels;         // regularization levels; empty means the fixture default
  std::string phi = "cos,sin,tanh";  // commands needing one test function take the first
  std::vector<double> ts{0.5};
  std::string x;                   // point list as text; empty means the fixture default
  double dt = 1e-3;
  std::size_t paths = 10000;
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path out = "results";
  int workers = 0;                 // 0: BEL_GRADIENTS_WORKERS, else machine parallelism
};

const std::vector<std::string>& command_names();

struct ParseResult {
  std::optional<ExperimentConfig> config;  // empty: nothing to run
  int exit_code = 0;                       // meaningful when config is empty
  std::string message;                     // usage or error text
};

/// Command line, optionally layered over a `key = value` file given by
/// --config. Flags given on the command line override the file; a flag given
/// twice keeps its last value.
ParseResult parse_config(int argc, const char* const* argv);

/// Applies `key = value` lines to cfg. Blank lines and lines starting with
/// '#' are skipped. Throws std::invalid_argument naming the line on unknown
/// keys or malformed values.
void apply_config_file(const std::filesystem::path& file, ExperimentConfig& cfg);
void apply_config_text(const std::string& text, const std::string& source, ExperimentConfig& cfg);

/// Flag value, else BEL_GRADIENTS_WORKERS, else 0.
int effective_workers(const ExperimentConfig& cfg);

/// Runs the command. 0: every check passed, 2: a check failed, 1: usage or
/// IO error.
int run(const ExperimentConfig& cfg);

}  // namespace belgrad::harness
