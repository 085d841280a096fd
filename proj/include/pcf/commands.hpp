#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pcf {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitInputError = 2,
  kExitSolveError = 3,
};

struct RunConfig {
  std::string command;
  std::string preset;
  std::string definition_path;
  int level = 4;
  std::string bc = "dirichlet";
  std::optional<std::vector<double>> mu;
  double p = 2.0;
  std::string function;  // JSON text or path; empty selects random-harmonic
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::optional<double> tol;
  int max_level = 10;
  bool timing = false;
};

std::vector<std::string> command_names();

/// Runs one subcommand, writing its artifacts under cfg.out_dir and a short
/// summary to `log`. Errors are reported on `err` and mapped to exit codes.
int run(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace pcf
