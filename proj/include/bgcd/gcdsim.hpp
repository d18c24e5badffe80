#pragma once

#include "bgcd/funcspace.hpp"
#include "bgcd/rng.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace bgcd {

inline constexpr double kReferenceB = 2.83297657;

struct CycleStats {
  std::uint64_t gcd = 0;
  int cycles = 0;           ///< subtract-and-shift cycles until the pair is equal
  int subtractions = 0;     ///< cycles plus the final subtraction that gives 0
  int initial_halvings = 0; ///< exponent of the common power of two
  std::vector<double> ratio_trace; ///< min/max of the pair after each cycle
};

/// Binary gcd of u, v >= 1 with cycle accounting; std::invalid_argument on 0.
CycleStats binary_gcd(std::uint64_t u, std::uint64_t v);

/// One step of the ratio chain with a given shift m >= 1: the pair (1, x)
/// becomes ((1-x)/2^m, x), returned as min/max. nullopt when x == 1 (the
/// difference is 0 and the chain stops).
std::optional<double> model_step(double x, int m);
/// The same with m drawn from P(m) = 2^-m.
std::optional<double> model_step(double x, CounterRng& rng);

/// Survival fraction of samples with value >= threshold.
struct EmpiricalTail {
  std::vector<double> thresholds;
  std::vector<double> survival;
  std::size_t n_samples = 0;
  int after_cycles = 0;
};

/// Empirical tail of `samples` (any order) on `thresholds` (ascending).
EmpiricalTail empirical_tail(std::vector<double> samples, std::vector<double> thresholds,
                             int after_cycles);

/// sup_y |#{s >= y}/N - g(y)| for sorted samples in [0,1] and a continuous,
/// nonincreasing g. Exact for piecewise-linear g.
double ks_distance(const std::vector<double>& sorted_samples, const GridFunction& g);

/// 101 thresholds i/100.
std::vector<double> default_thresholds();

struct ModelSimulation {
  std::size_t n_chains = 0;
  int n_steps = 0;
  std::uint64_t seed = 0;
  /// samples[n] are the sorted chain values after n steps; absorbed chains
  /// count as 0.
  std::vector<std::vector<double>> samples;

  EmpiricalTail tail(int n, const std::vector<double>& thresholds = default_thresholds()) const;
};

/// Chain c uses stream (seed, c): word 0 gives the uniform start, the rest
/// feed the geometric shifts. Work is split over `threads` workers (0 means
/// hardware concurrency); the output does not depend on the split.
ModelSimulation simulate_model(std::size_t n_chains, int n_steps, std::uint64_t seed,
                               unsigned threads = 0);

/// Pair `index` under `seed`: two odd integers uniform in [1, 2^bits).
std::pair<std::uint64_t, std::uint64_t> draw_odd_pair(std::uint64_t seed, std::uint64_t index,
                                                      int bits);

struct IntegerSimulation {
  std::size_t n_pairs = 0;
  int bit_size = 0;
  std::uint64_t seed = 0;
  double mean_cycles = 0.0;
  double mean_log_uv = 0.0;   ///< natural log
  double b_implied = 0.0;     ///< mean_log_uv / mean_cycles
  double mean_log2_uv = 0.0;
  double b_implied_log2 = 0.0;
  int max_subtraction_excess = 0; ///< max of subtractions - (1 + floor(log2 max)), <= 0 expected
  std::size_t bound_violations = 0;
  /// samples[n-1]: sorted ratios after n cycles over pairs with at least n cycles.
  std::vector<std::vector<double>> samples;

  EmpiricalTail tail(int n, const std::vector<double>& thresholds = default_thresholds()) const;
  /// mean_cycles / (mean_log_uv / b_reference).
  double cycle_ratio(double b_reference = kReferenceB) const noexcept;
  double cycle_ratio_log2(double b_reference = kReferenceB) const noexcept;
};

/// Runs binary_gcd on `n_pairs` pairs from draw_odd_pair and aggregates.
/// Tails are kept for n = 1..tail_cycles. std::invalid_argument unless
/// 16 <= bits <= 64.
IntegerSimulation simulate_integers(std::size_t n_pairs, int bits, std::uint64_t seed,
                                    unsigned threads = 0, int tail_cycles = 8);

} // namespace bgcd
