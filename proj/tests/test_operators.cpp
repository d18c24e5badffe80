#include <doctest.h>

#include <stdexcept>

#include "bgcd/moebius.hpp"
#include "bgcd/operators.hpp"
#include "bgcd/verify.hpp"

#include <cmath>

using namespace bgcd;

namespace {

const TruncationPolicy kPolicy(60);

TailFunction g1_tail(std::size_t n) {
  return TailFunction(GridFunction::sample(n, [](double x) { return g1_series(x); }),
                      kIteratedTolerance);
}

// F applied to a function given in closed form, no grid involved.
template <class G>
double dense_F(const G& g, double x) {
  double s = 0.0;
  for (int k = 60; k >= 1; --k) {
    const double p = std::ldexp(1.0, k);
    s += (g(x / (x + p)) - g(1.0 / (1.0 + p * x))) / p;
  }
  return s;
}

} // namespace

TEST_CASE("TruncationPolicy") {
  CHECK(TruncationPolicy(60).tail_bound() == std::ldexp(1.0, -60));
  CHECK(TruncationPolicy(1).tail_bound() == 0.5);
  CHECK_THROWS_AS(TruncationPolicy(0), std::invalid_argument);
  CHECK_THROWS_AS(TruncationPolicy(63), std::invalid_argument);
}

TEST_CASE("apply_F(g_0) reproduces g_1") {
  const auto g1 = apply_F(initial_tail(4097), kPolicy);
  double worst = 0.0;
  for (std::size_t i = 0; i < g1.size(); ++i)
    worst = std::max(worst, std::abs(g1.ys()[i] - g1_series(g1.xs()[i])));
  // g_0 is linear, so interpolation is exact and only rounding remains
  CHECK(worst <= kPolicy.tail_bound() + 1e-14);
  CHECK(g1.ys().front() == 1.0);
  CHECK(g1.ys().back() == 0.0);
}

TEST_CASE("each summand of F is nonnegative") {
  // x/(x+2^k) <= 1/(1+2^k x) because x(1+2^k x) - (x+2^k) = 2^k (x^2 - 1) <= 0
  const auto g = g1_tail(2049);
  for (std::size_t i = 0; i < g.size(); i += 16) {
    const double x = g.xs()[i];
    for (int k = 1; k <= 60; ++k) {
      const double p = std::ldexp(1.0, k);
      const double lo = x / (x + p), hi = 1.0 / (1.0 + p * x);
      CHECK(lo <= hi);
      CHECK(g.function().interpolate(lo) - g.function().interpolate(hi) >= 0.0);
    }
  }
}

TEST_CASE("||F||_inf ratio is at most 2") {
  CounterRng rng = CounterRng::for_stream(21, 0);
  for (int i = 0; i < 20; ++i) {
    const auto f = random_tail(rng, 1025), g = random_tail(rng, 1025);
    CHECK(operator_norm_bound_check(f, g, kPolicy) <= 2.0);
  }
  const auto g0 = initial_tail(1025);
  const auto g1 = apply_F(g0, kPolicy);
  std::vector<double> mid(g0.size());
  for (std::size_t i = 0; i < mid.size(); ++i)
    mid[i] = 0.5 * (g0.ys()[i] + g1.ys()[i]);
  const TailFunction between(g0.function().with_values(mid), kIteratedTolerance);
  CHECK(operator_norm_bound_check(g0, between, kPolicy) <= 2.0);
  CHECK_THROWS_AS(operator_norm_bound_check(g0, g0, kPolicy), std::invalid_argument);
}

TEST_CASE("norm ratio for (g_0, g_1) agrees with a dense evaluation") {
  const std::size_t n = 10001;
  const auto g0 = initial_tail(n);
  const auto g1 = g1_tail(n);
  const double ratio = operator_norm_bound_check(g0, g1, kPolicy);

  auto g1_exact = [](double x) { return g1_series(x); };
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    const double f0 = g1_series(x);     // F(g_0) = g_1
    const double f1 = i == 0 ? 1.0 : i + 1 == n ? 0.0 : dense_F(g1_exact, x);
    num = std::max(num, std::abs(f1 - f0));
    den = std::max(den, std::abs(g1_series(x) - (1.0 - x)));
  }
  CHECK(std::abs(ratio - num / den) < 1e-6);
}

TEST_CASE("apply_B2 basics") {
  const auto zero = sample_density(4096, [](double) { return 0.0; });
  const auto image_zero = apply_B2(zero, kPolicy);
  for (double v : image_zero.ys())
    CHECK(v == 0.0);

  // B_2(1)(x) = sum 1/(x+2^k)^2 + 1/(1+2^k x)^2, whose exact integral is 1 - 2^-K;
  // the grid quadrature loses a little to the logarithmic growth at 0
  const auto one = sample_density(4096, [](double) { return 1.0; });
  const auto image_one = apply_B2(one, kPolicy);
  double worst = 0.0;
  for (std::size_t i = 0; i < image_one.size(); ++i) {
    const double x = image_one.xs()[i];
    double exact = 0.0;
    for (int k = 60; k >= 1; --k) {
      const double p = std::ldexp(1.0, k);
      exact += 1.0 / ((x + p) * (x + p)) + 1.0 / ((1.0 + p * x) * (1.0 + p * x));
    }
    worst = std::max(worst, std::abs(image_one.ys()[i] - exact) / exact);
    CHECK(image_one.ys()[i] >= 0.0);
  }
  CHECK(worst < 1e-14);
  CHECK(std::abs(integral(image_one) - 1.0) < 2e-3);
}

TEST_CASE("B2 of the derivative matches the derivative of F") {
  const auto g0 = initial_tail(4097);
  const auto g1 = apply_F(g0, kPolicy);
  const auto g2 = apply_F(g1, kPolicy);
  CHECK(l1_distance(apply_B2(discrete_derivative(g0), kPolicy), discrete_derivative(g1)) < 5e-3);
  CHECK(l1_distance(apply_B2(discrete_derivative(g1), kPolicy), discrete_derivative(g2)) < 5e-3);
}

TEST_CASE("contraction_check") {
  const auto one = sample_density(4096, [](double) { return 1.0; });
  const auto zero = sample_density(4096, [](double) { return 0.0; });
  const auto same = contraction_check(one, one, kPolicy);
  CHECK(same.first == 0.0);
  CHECK(same.second == 0.0);
  const auto [after, before] = contraction_check(one, zero, kPolicy);
  CHECK(before == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(after == doctest::Approx(integral(apply_B2(one, kPolicy))).epsilon(1e-14));
  CHECK(after <= before);

  // sign-changing difference: mass cancels and the inequality turns strict
  const auto up = sample_density(4096, [](double x) { return 2.0 * x; });
  const auto [a2, b2] = contraction_check(up, one, kPolicy);
  CHECK(a2 < b2);
}

TEST_CASE("L1 contraction over random pairs") {
  CounterRng rng = CounterRng::for_stream(22, 0);
  for (int i = 0; i < 100; ++i) {
    const auto h1 = random_density(rng, 4096), h2 = random_density(rng, 4096);
    const auto [after, before] = contraction_check(h1, h2, kPolicy);
    CHECK(after <= before + 1e-9);
  }
}

TEST_CASE("B2 preserves the integral of nonnegative densities") {
  CounterRng rng = CounterRng::for_stream(23, 0);
  for (int i = 0; i < 100; ++i) {
    const auto h = random_density(rng, 4096);
    CHECK(std::abs(integral(apply_B2(h, kPolicy)) - integral(h)) <= 2e-3);
  }
}

TEST_CASE("F and B2 are linear") {
  CounterRng rng = CounterRng::for_stream(24, 0);
  for (int i = 0; i < 100; ++i) {
    const double alpha = 4.0 * rng.uniform() - 2.0, beta = 4.0 * rng.uniform() - 2.0;
    const auto f = random_tail(rng, 513), g = random_tail(rng, 513);
    std::vector<double> mix(f.size());
    for (std::size_t j = 0; j < mix.size(); ++j)
      mix[j] = alpha * f.ys()[j] + beta * g.ys()[j];
    const auto lhs = apply_F_series(f.function().with_values(mix), kPolicy);
    const auto Ff = apply_F_series(f.function(), kPolicy);
    const auto Fg = apply_F_series(g.function(), kPolicy);
    for (std::size_t j = 0; j < mix.size(); ++j)
      CHECK(std::abs(lhs.ys()[j] - (alpha * Ff.ys()[j] + beta * Fg.ys()[j])) <= 1e-12);

    const auto h1 = random_density(rng, 512), h2 = random_density(rng, 512);
    std::vector<double> hm(h1.size());
    for (std::size_t j = 0; j < hm.size(); ++j)
      hm[j] = alpha * h1.ys()[j] + beta * h2.ys()[j];
    const auto b = apply_B2_values(h1.xs(), hm, kPolicy);
    const auto b1 = apply_B2_values(h1, kPolicy), b2 = apply_B2_values(h2, kPolicy);
    for (std::size_t j = 0; j < hm.size(); ++j)
      CHECK(std::abs(b[j] - (alpha * b1[j] + beta * b2[j])) <= 1e-12);
  }
}

TEST_CASE("truncation: K and K+5 differ by at most 2^-K") {
  const auto g = g1_tail(1025);
  for (int K = 1; K <= 50; K += 7) {
    const auto a = apply_F_series(g.function(), TruncationPolicy(K));
    const auto b = apply_F_series(g.function(), TruncationPolicy(K + 5));
    CHECK(sup_distance(a, b) <= std::ldexp(1.0, -K));
  }
}

TEST_CASE("check_k1_surface and closure under F") {
  CHECK(check_k1_surface(initial_tail(257).function()).member);
  CHECK_FALSE(check_k1_surface(GridFunction::sample(257, [](double) { return 0.5; })).member);

  CounterRng rng = CounterRng::for_stream(25, 0);
  for (int i = 0; i < 20; ++i) {
    const auto g = random_tail(rng, 1025);
    if (!check_k2(g.function()).member)
      continue;
    const auto Fg = apply_F(g, kPolicy);
    CHECK(check_k1_surface(Fg.function()).member);
    CHECK(check_k2(Fg.function(), kIteratedTolerance).member);
  }
}
