#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace quasispec {

struct RunConfig {
  std::string command;  // solve, asymptotics, basis, projector, sweep, resolvent
  std::string potential_path;
  std::string direction_path;  // projector: perturbation direction, cos x if empty
  int N = 20;
  double sigma = 0.25;
  double R = 1.0;
  double nu = 1.0;
  std::uint64_t seed = 7;
  std::string output_dir = ".";
  double tol_root = 1e-9;
  std::size_t grid = 4096;
  int samples = 20;
  int halvings = 6;
  double t0 = 0.5;
  double lambda = -5.0;
  double eps0 = 0.2;

  /// Throws Parse when a command-specific field is missing or out of range.
  void validate() const;
};

inline constexpr int kExitParse = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitConflict = 4;

/// Runs one command and writes its reports into cfg.output_dir. On failure the
/// error JSON goes to stderr and to error.json; returns the exit status.
int run(const RunConfig& cfg);

/// Parses the command line and calls run().
int cli_main(int argc, char** argv);

}  // namespace quasispec
