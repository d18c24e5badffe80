// One line per acceptance criterion. Exit status is 0 when the set of failing
// criteria equals kKnownFailures, so a regression and a stale entry both show.

#include "bgcd/fixpoint.hpp"
#include "bgcd/funcspace.hpp"
#include "bgcd/gcdsim.hpp"
#include "bgcd/mellin.hpp"
#include "bgcd/moebius.hpp"
#include "bgcd/operators.hpp"
#include "bgcd/spectral.hpp"
#include "bgcd/verify.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace bgcd;

namespace {

constexpr double kTargetB = 2.83297657;
constexpr double kTargetLambda2 = 0.1948;

// Mean cycles against ln(uv)/b misses by about 44%; see README.
const std::set<int> kKnownFailures{8};

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << ']';
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const IterationHistory& default_history() {
  static const IterationHistory h = iterate_to_fixpoint(4097, TruncationPolicy(60), 1e-10, 200);
  return h;
}

Outcome criterion1() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  const double b = compute_b(default_history().final_iterate()).b;
  const double t_default = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const auto ref = iterate_to_fixpoint(65537, TruncationPolicy(62), 1e-12, 200);
  const double b_ref = compute_b(ref.final_iterate()).b;
  const double t_ref = seconds_since(t0);
  o.detail << std::setprecision(10) << "b=" << b << " b_ref=" << b_ref << std::setprecision(3)
           << " t=" << t_default << "s t_ref=" << t_ref << 's';
  o.require(b >= 2.83287657 && b <= 2.83307657, "default b within 1e-4");
  o.require(std::abs(b_ref - kTargetB) <= 1e-5, "reference b within 1e-5");
  o.require(t_default + t_ref < 120.0, "runtime < 2 min");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto& h = default_history();
  const auto ratio = contraction_ratio_estimate(h);
  o.detail << "iterations=" << h.iterations() << std::setprecision(5)
           << " ratio=" << (ratio ? *ratio : -1.0);
  o.require(h.converged_at.has_value() && *h.converged_at <= 40, "converged within 40");
  o.require(ratio && *ratio >= 0.16 && *ratio <= 0.23, "ratio in [0.16, 0.23]");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto op = discretize_B2(1024, TruncationPolicy(60));
  const auto lead = leading_eigen(op);
  const auto est = subdominant_modulus(op, lead);
  const auto limit = resample(extract_limit_density(default_history()), op.nodes);
  const double dist = l1_distance(lead.density(op), limit);
  o.detail << std::setprecision(6) << "lambda1=" << lead.lambda1 << " |lambda2|=" << est.lambda2_modulus
           << " L1(eigvec,-g'_inf)=" << dist;
  o.require(std::abs(lead.lambda1 - 1.0) <= 5e-3, "lambda1 within 5e-3");
  o.require(std::abs(est.lambda2_modulus - kTargetLambda2) <= 0.02, "|lambda2| within 0.02");
  o.require(dist < 0.01, "eigenvector L1 < 0.01");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const TruncationPolicy policy(60);
  CounterRng rng = CounterRng::for_stream(20240901, 4);
  constexpr int kInstances = 100;

  double contraction_excess = -1e300, integral_drift = 0.0, linearity = 0.0, norm_ratio = 0.0;
  for (int i = 0; i < kInstances; ++i) {
    const auto h1 = random_density(rng), h2 = random_density(rng);
    const auto [after, before] = contraction_check(h1, h2, policy);
    contraction_excess = std::max(contraction_excess, after - before);
    integral_drift = std::max(integral_drift, std::abs(integral(apply_B2(h1, policy)) - integral(h1)));

    const auto g1 = random_tail(rng), g2 = random_tail(rng);
    const double a = rng.uniform() * 4.0 - 2.0, c = rng.uniform() * 4.0 - 2.0;
    std::vector<double> mix(g1.ys().size());
    for (std::size_t j = 0; j < mix.size(); ++j)
      mix[j] = a * g1.ys()[j] + c * g2.ys()[j];
    const auto lhs = apply_F_series(g1.function().with_values(mix), policy);
    const auto f1 = apply_F_series(g1.function(), policy), f2 = apply_F_series(g2.function(), policy);
    for (std::size_t j = 0; j < mix.size(); ++j)
      linearity = std::max(linearity, std::abs(lhs.ys()[j] - (a * f1.ys()[j] + c * f2.ys()[j])));
    if (sup_distance(g1, g2) > 0.0)
      norm_ratio = std::max(norm_ratio, operator_norm_bound_check(g1, g2, policy));
  }

  bool closure = true;
  double holder = 0.0;
  const auto& h = default_history();
  for (std::size_t n = 0; n < h.iterates.size(); ++n) {
    const auto& g = h.iterates[n].function();
    closure = closure && check_k1_surface(g).member && check_k2(g, kIteratedTolerance).member;
    if (n >= 1)
      holder = std::max(holder, holder_seminorm(g));
  }

  o.detail << std::setprecision(3) << "contraction_excess=" << contraction_excess
           << " integral_drift=" << integral_drift << " linearity=" << linearity
           << " norm_ratio=" << norm_ratio << " holder=" << holder << " closure=" << closure;
  o.require(contraction_excess <= 1e-9, "L1 contraction");
  o.require(integral_drift <= 2e-3, "integral preservation");
  o.require(linearity <= 1e-12, "F linearity");
  o.require(norm_ratio <= 2.0, "sup-norm ratio");
  o.require(closure, "K1/K2 closure");
  o.require(holder <= 5.0 + 1e-6, "Holder seminorm");
  return o;
}

Outcome criterion5() {
  Outcome o;
  const TruncationPolicy policy(60);
  const auto& h = default_history();
  double worst = 0.0;
  for (std::size_t n : {std::size_t{0}, std::size_t{1}}) {
    const auto& g = h.iterates[n];
    const auto via_derivative = discrete_derivative(h.iterates[n + 1]);
    const auto via_b2 = apply_B2(discrete_derivative(g), policy);
    worst = std::max(worst, l1_distance(via_derivative, via_b2));
  }
  const auto u = derivative_error_sequence(h);
  double rise = 0.0;
  for (std::size_t n = 1; n < u.size(); ++n)
    rise = std::max(rise, u[n] - u[n - 1]);
  o.detail << std::setprecision(3) << "commutation_L1=" << worst << " max_u_rise=" << rise;
  o.require(worst < 5e-3, "commutation < 5e-3");
  o.require(rise <= 1e-6, "u_n nonincreasing");
  return o;
}

Outcome criterion6() {
  Outcome o;
  double residual = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double x = 0.01 + 0.98 * i / 1000.0;
    residual = std::max(residual, std::abs(evaluate_identity(x).residual()));
  }
  double p_max = 0.0;
  for (int i = 0; i <= 1000000; ++i)
    p_max = std::max(p_max, std::abs(p_eval(i / 1000000.0)));
  double g1_gap = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    g1_gap = std::max(g1_gap, std::abs(g1_via_identity(x) - g1_series(x)));
  }
  o.detail << std::setprecision(3) << "max_residual=" << residual << " max|P|=" << p_max
           << " g1_gap=" << g1_gap;
  o.require(residual < 1e-9, "identity residual");
  o.require(p_max < 1.5549e-11, "|P| bound");
  o.require(g1_gap <= 1e-9, "g1 paths agree");
  return o;
}

Outcome criterion7() {
  Outcome o;
  constexpr std::size_t N = 1000000;
  const auto t0 = std::chrono::steady_clock::now();
  const auto sim = simulate_model(N, 8, 42, 0);
  const double t = seconds_since(t0);
  const double bound = 5.0 / std::sqrt(static_cast<double>(N));
  TailFunction g = initial_tail();
  double worst = 0.0;
  for (int n = 0; n <= 8; ++n) {
    worst = std::max(worst, ks_distance(sim.samples[static_cast<std::size_t>(n)], g.function()));
    g = apply_F(g, TruncationPolicy(60));
  }
  o.detail << std::setprecision(3) << "max_KS=" << worst << " bound=" << bound << " t=" << t << 's';
  o.require(worst < bound, "KS below 5/sqrt(N)");
  o.require(t < 60.0, "runtime < 1 min");
  return o;
}

Outcome criterion8() {
  Outcome o;
  constexpr std::size_t N = 100000;
  constexpr std::uint64_t seed = 42;
  std::size_t mismatches = 0, violations = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const auto [u, v] = draw_odd_pair(seed, i, 64);
    const auto s = binary_gcd(u, v);
    mismatches += s.gcd != std::gcd(u, v);
    const int bound = 1 + (std::bit_width(std::max(u, v)) - 1);
    violations += s.subtractions > bound;
  }
  const auto r = simulate_integers(N, 64, seed, 0, 3);
  const double ratio = r.cycle_ratio(kTargetB);
  double tail_gap = 0.0;
  TailFunction g = initial_tail();
  for (int n = 1; n <= 3; ++n) {
    g = apply_F(g, TruncationPolicy(60));
    tail_gap = std::max(tail_gap, ks_distance(r.samples[static_cast<std::size_t>(n - 1)], g.function()));
  }
  o.detail << std::setprecision(5) << "gcd_mismatches=" << mismatches << " bound_violations=" << violations
           << " mean_cycles/(ln(uv)/b)=" << ratio << " (log2 variant " << r.cycle_ratio_log2(kTargetB)
           << ") tail_gap=" << tail_gap;
  o.require(mismatches == 0, "Euclid oracle");
  o.require(violations == 0 && r.bound_violations == 0, "subtraction bound");
  o.require(std::abs(ratio - 1.0) <= 0.02, "mean cycles within 2% of ln(uv)/b");
  o.require(tail_gap <= 0.05, "conditional tails within 0.05");
  return o;
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"constant reproduction", criterion1}, {"convergence", criterion2},
      {"spectral", criterion3},              {"operator properties", criterion4},
      {"commutation", criterion5},           {"Mellin identity", criterion6},
      {"model chain vs operator", criterion7}, {"integer algorithm", criterion8},
  };
  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail << " [exception: " << e.what() << ']';
    }
    if (!o.passed)
      failed.insert(id);
    std::cout << (o.passed ? "PASS" : "FAIL") << ' ' << id << ' ' << criteria[i].first << ": "
              << o.detail.str();
    if (!o.passed && kKnownFailures.count(id))
      std::cout << " (known)";
    std::cout << std::endl;
  }
  if (failed != kKnownFailures) {
    std::cout << "failures differ from the known set\n";
    return 1;
  }
  std::cout << "only known failures\n";
  return 0;
}
