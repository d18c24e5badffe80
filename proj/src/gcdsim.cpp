#include "bgcd/gcdsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace bgcd {

namespace {

unsigned resolve_threads(unsigned threads) {
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  return threads;
}

// Runs body(begin, end) over contiguous slices of [0, n).
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
  threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end)
      break;
    pool.emplace_back(body, begin, end);
  }
  for (auto& th : pool)
    th.join();
}

int floor_log2(std::uint64_t v) { return 63 - std::countl_zero(v); }

} // namespace

CycleStats binary_gcd(std::uint64_t u, std::uint64_t v) {
  if (u == 0 || v == 0)
    throw std::invalid_argument("binary_gcd: inputs must be positive");
  CycleStats s;
  s.initial_halvings = std::countr_zero(u | v);
  u >>= std::countr_zero(u);
  v >>= std::countr_zero(v);
  while (u != v) {
    if (u < v)
      std::swap(u, v);
    u -= v;
    u >>= std::countr_zero(u);
    ++s.cycles;
    s.ratio_trace.push_back(static_cast<double>(std::min(u, v)) /
                            static_cast<double>(std::max(u, v)));
  }
  s.subtractions = s.cycles + 1;
  s.gcd = u << s.initial_halvings;
  return s;
}

std::optional<double> model_step(double x, int m) {
  if (!(x > 0.0 && x <= 1.0))
    throw std::domain_error("model_step: x outside (0,1]");
  if (m < 1)
    throw std::invalid_argument("model_step: m must be at least 1");
  if (x == 1.0)
    return std::nullopt;
  const double t = std::ldexp(1.0 - x, -m);
  return std::min(t, x) / std::max(t, x);
}

std::optional<double> model_step(double x, CounterRng& rng) {
  return model_step(x, rng.geometric());
}

EmpiricalTail empirical_tail(std::vector<double> samples, std::vector<double> thresholds,
                             int after_cycles) {
  std::ranges::sort(samples);
  EmpiricalTail t;
  t.n_samples = samples.size();
  t.after_cycles = after_cycles;
  t.survival.reserve(thresholds.size());
  const double n = static_cast<double>(samples.size());
  for (double y : thresholds) {
    const auto below = std::ranges::lower_bound(samples, y) - samples.begin();
    t.survival.push_back(samples.empty() ? 0.0
                                         : static_cast<double>(samples.size() - below) / n);
  }
  t.thresholds = std::move(thresholds);
  return t;
}

double ks_distance(const std::vector<double>& sorted, const GridFunction& g) {
  const double n = static_cast<double>(sorted.size());
  if (sorted.empty())
    return 1.0;
  double d = 0.0;
  // Between consecutive samples the empirical survival is constant and g is
  // monotone, so the sup is reached at sample points or their left limits.
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double gy = g.interpolate(sorted[i]);
    const double at = static_cast<double>(sorted.size() - i) / n;
    const double after = static_cast<double>(sorted.size() - i - 1) / n;
    d = std::max({d, std::abs(at - gy), std::abs(after - gy)});
  }
  return d;
}

std::vector<double> default_thresholds() {
  std::vector<double> t(101);
  for (int i = 0; i <= 100; ++i)
    t[i] = i / 100.0;
  return t;
}

EmpiricalTail ModelSimulation::tail(int n, const std::vector<double>& thresholds) const {
  return empirical_tail(samples.at(static_cast<std::size_t>(n)), thresholds, n);
}

ModelSimulation simulate_model(std::size_t n_chains, int n_steps, std::uint64_t seed,
                               unsigned threads) {
  if (n_chains < 1)
    throw std::invalid_argument("simulate_model: need at least one chain");
  if (n_steps < 0)
    throw std::invalid_argument("simulate_model: negative step count");
  ModelSimulation sim;
  sim.n_chains = n_chains;
  sim.n_steps = n_steps;
  sim.seed = seed;
  sim.samples.assign(static_cast<std::size_t>(n_steps) + 1, std::vector<double>(n_chains));

  parallel_for(n_chains, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      auto rng = CounterRng::for_stream(seed, c);
      double x = rng.uniform();
      sim.samples[0][c] = x;
      for (int s = 1; s <= n_steps; ++s) {
        if (x > 0.0) {
          const auto next = model_step(x, rng);
          x = next ? *next : 0.0;
        }
        sim.samples[static_cast<std::size_t>(s)][c] = x;
      }
    }
  });
  for (auto& v : sim.samples)
    std::ranges::sort(v);
  return sim;
}

std::pair<std::uint64_t, std::uint64_t> draw_odd_pair(std::uint64_t seed, std::uint64_t index,
                                                      int bits) {
  if (bits < 1 || bits > 64)
    throw std::invalid_argument("draw_odd_pair: bits must lie in [1, 64]");
  auto rng = CounterRng::for_stream(seed, index);
  const int drop = 64 - bits;
  const std::uint64_t u = (rng.next() >> drop) | 1u;
  const std::uint64_t v = (rng.next() >> drop) | 1u;
  return {u, v};
}

EmpiricalTail IntegerSimulation::tail(int n, const std::vector<double>& thresholds) const {
  if (n < 1)
    throw std::out_of_range("IntegerSimulation::tail: n must be at least 1");
  return empirical_tail(samples.at(static_cast<std::size_t>(n - 1)), thresholds, n);
}

double IntegerSimulation::cycle_ratio(double b_reference) const noexcept {
  return mean_cycles / (mean_log_uv / b_reference);
}

double IntegerSimulation::cycle_ratio_log2(double b_reference) const noexcept {
  return mean_cycles / (mean_log2_uv / b_reference);
}

IntegerSimulation simulate_integers(std::size_t n_pairs, int bits, std::uint64_t seed,
                                    unsigned threads, int tail_cycles) {
  if (bits < 16 || bits > 64)
    throw std::invalid_argument("simulate_integers: bit size must lie in [16, 64]");
  if (n_pairs < 1)
    throw std::invalid_argument("simulate_integers: need at least one pair");

  struct PairResult {
    int cycles;
    int excess;
    double log_uv;
  };
  std::vector<PairResult> results(n_pairs);
  const auto cycles_kept = static_cast<std::size_t>(std::max(tail_cycles, 0));
  // ratio after cycle n for pair p, NaN if the pair stopped earlier
  std::vector<double> ratios(n_pairs * cycles_kept);

  parallel_for(n_pairs, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto [u, v] = draw_odd_pair(seed, p, bits);
      const CycleStats s = binary_gcd(u, v);
      results[p] = {s.cycles, s.subtractions - (1 + floor_log2(std::max(u, v))),
                    std::log(static_cast<double>(u)) + std::log(static_cast<double>(v))};
      for (std::size_t n = 0; n < cycles_kept; ++n)
        ratios[p * cycles_kept + n] = n < s.ratio_trace.size() ? s.ratio_trace[n] : std::nan("");
    }
  });

  IntegerSimulation r;
  r.n_pairs = n_pairs;
  r.bit_size = bits;
  r.seed = seed;
  r.max_subtraction_excess = std::numeric_limits<int>::min();
  double cycles = 0.0, logs = 0.0;
  for (const auto& pr : results) {
    cycles += pr.cycles;
    logs += pr.log_uv;
    r.max_subtraction_excess = std::max(r.max_subtraction_excess, pr.excess);
    if (pr.excess > 0)
      ++r.bound_violations;
  }
  const double n = static_cast<double>(n_pairs);
  r.mean_cycles = cycles / n;
  r.mean_log_uv = logs / n;
  r.b_implied = r.mean_log_uv / r.mean_cycles;
  r.mean_log2_uv = r.mean_log_uv / std::numbers::ln2;
  r.b_implied_log2 = r.mean_log2_uv / r.mean_cycles;

  r.samples.resize(cycles_kept);
  for (std::size_t k = 0; k < cycles_kept; ++k) {
    auto& out = r.samples[k];
    for (std::size_t p = 0; p < n_pairs; ++p) {
      const double v = ratios[p * cycles_kept + k];
      if (!std::isnan(v))
        out.push_back(v);
    }
    std::ranges::sort(out);
  }
  return r;
}

} // namespace bgcd
