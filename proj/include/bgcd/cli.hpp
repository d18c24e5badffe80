#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace bgcd {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitNoConvergence = 2,
  kExitVerifyFailed = 3,
  kExitUsage = 64,
};

struct RunConfig {
  std::string subcommand;
  std::size_t grid_size = 4097;
  int truncation_k = 60;
  double tol = 1e-10;
  int max_iter = 200;
  std::uint64_t seed = 42;
  std::size_t n_pairs = 100000;
  std::size_t n_chains = 100000;
  int bit_size = 64;
  int steps = 8;
  std::size_t points = 1000;
  std::filesystem::path input;
  std::filesystem::path output_dir = ".";
  unsigned threads = 0;
  bool grid_size_set = false;
  bool dump_matrix = false;
};

int cmd_iterate(const RunConfig& config);
int cmd_constant(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_spectrum(const RunConfig& config);
int cmd_mellin(const RunConfig& config);
int cmd_verify(const RunConfig& config);

/// Parses argv and dispatches to a subcommand; returns the process exit code.
int run_cli(int argc, const char* const* argv);

} // namespace bgcd
