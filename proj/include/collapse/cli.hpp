#pragma once

// Command-line front end. Every output file carries the full configuration
// as `key = value` comment lines, which read back as a config file.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "collapse/dynamics.hpp"

namespace collapse::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kRuntime = 2, kCheckFailed = 3 };

inline constexpr int kMaxSites = 12;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Simulate, Decay, CoarseGrain, OracleCheck };

std::string to_string(Command command);

struct RunConfig {
  Command command = Command::Simulate;
  // Unset fields take the command's defaults in apply_defaults().
  std::optional<int> n_sites;
  std::optional<int> rows;
  std::string theta;
  double phase_alpha = 0.0;
  double phase_beta = 0.0;
  std::optional<double> x;
  std::optional<double> epsilon;
  std::uint64_t seed = 1;
  std::string initial;  // empty selects the command's default
  std::string policy = "markov";
  std::string stuff_surface = "post";
  std::filesystem::path out_dir = ".";
  std::string format = "pgm";

  // decay
  std::string sweep = "epsilon";
  std::vector<double> epsilons{0.25, 0.2, 0.15, 0.1};
  std::vector<int> particles{2, 3, 4, 5};
  int seeds = 50;
  double threshold = 0.005;
  long long window = -1;

  // coarse-grain
  int block = 2;
  bool renormalise = true;
  long long min_blocks = 200;

  // oracle-check
  long long runs = 100000;
  long long channel_runs = 10000;
  double tv_max = 0.02;
  double channel_max = 0.05;
  bool inject_misordered = false;

  void apply_defaults();

  /// Throws ConfigError with a message naming the offending setting. Expects
  /// apply_defaults() to have run.
  void validate() const;

  ModelParams model_params() const;
  LatticeGeometry geometry() const;
  InitialState initial_state() const;
  MotionPolicy motion_policy() const;
  StuffSurface stuff() const;

  /// `key = value` lines for every setting.
  std::vector<std::string> describe() const;
};

/// Angles as plain numbers or multiples of pi: "0.5", "pi/6", "4pi/9", "-pi".
double parse_angle(const std::string& text);

/// "vacuum", "eigen:BITS", "superposition:BITS,BITS", "single-link" or
/// "left-right:L"; bit k of BITS is register slot k.
InitialState parse_initial(const std::string& text, int n_sites);

int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_decay(const RunConfig& config, std::ostream& out);
int cmd_coarse_grain(const RunConfig& config, std::ostream& out);
int cmd_oracle_check(const RunConfig& config, std::ostream& out);

/// Parses arguments, dispatches, and maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace collapse::cli
