#pragma once

#include "bgcd/funcspace.hpp"
#include "bgcd/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bgcd {

/// Convex decreasing tail with g(0)=1, g(1)=0: a random mixture of
/// (1-x)^p and (1-x)/(1+cx).
TailFunction random_tail(CounterRng& rng, std::size_t n_nodes = kDefaultGridSize);

/// Nonnegative density on i/n, i = 1..n, with integral at most 1: a random
/// mixture of powers x^p (p > -1/2), a bump and a constant.
DensityFunction random_density(CounterRng& rng, std::size_t n = kDefaultGridSize - 1);

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::size_t grid_size = kDefaultGridSize;
  int K = 60;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  int instances = 100; ///< random instances per property
};

/// Runs every property suite; one entry per invariant.
std::vector<CheckResult> run_verification(const VerifyOptions& options = {});

} // namespace bgcd
