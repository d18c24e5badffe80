#include "bgcd/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bgcd {

TruncationPolicy::TruncationPolicy(int K) : K_(K), tail_bound_(std::ldexp(1.0, -K)) {
  if (K < 1 || K > 62)
    throw std::invalid_argument("TruncationPolicy: K must lie in [1, 62]");
}

GridFunction apply_F_series(const GridFunction& g, const TruncationPolicy& policy) {
  const auto xs = g.xs();
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    double s = 0.0;
    for (int k = policy.K(); k >= 1; --k) {
      const double p = std::ldexp(1.0, k);
      s += (g.interpolate(x / (x + p)) - g.interpolate(1.0 / (1.0 + p * x))) / p;
    }
    out[i] = s;
  }
  return g.with_values(std::move(out));
}

TailFunction apply_F(const TailFunction& g, const TruncationPolicy& policy) {
  const GridFunction raw = apply_F_series(g.function(), policy);
  std::vector<double> ys(raw.ys().begin(), raw.ys().end());
  ys.front() = 1.0;
  ys.back() = 0.0;
  return TailFunction(raw.with_values(std::move(ys)), g.tolerance());
}

std::vector<double> apply_B2_values(std::span<const double> xs, std::span<const double> ys,
                                    const TruncationPolicy& policy) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("apply_B2_values: bad grid");
  const detail::CellLocator loc(xs);
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    double s = 0.0;
    for (int k = policy.K(); k >= 1; --k) {
      const double p = std::ldexp(1.0, k);
      const double w1 = 1.0 / (x + p);
      const double w2 = 1.0 / (1.0 + p * x);
      s += w1 * w1 * detail::interpolate(xs, ys, loc, x * w1) +
           w2 * w2 * detail::interpolate(xs, ys, loc, w2);
    }
    out[i] = s;
  }
  return out;
}

std::vector<double> apply_B2_values(const DensityFunction& h, const TruncationPolicy& policy) {
  return apply_B2_values(h.xs(), h.ys(), policy);
}

DensityFunction apply_B2(const DensityFunction& h, const TruncationPolicy& policy) {
  auto ys = apply_B2_values(h, policy);
  return DensityFunction({h.xs().begin(), h.xs().end()}, std::move(ys));
}

double operator_norm_bound_check(const TailFunction& g1, const TailFunction& g2,
                                 const TruncationPolicy& policy) {
  const double denom = sup_distance(g1, g2);
  if (denom == 0.0)
    throw std::invalid_argument("operator_norm_bound_check: g1 and g2 coincide");
  return sup_distance(apply_F(g1, policy), apply_F(g2, policy)) / denom;
}

std::pair<double, double> contraction_check(const DensityFunction& h1, const DensityFunction& h2,
                                            const TruncationPolicy& policy) {
  if (!std::ranges::equal(h1.xs(), h2.xs()))
    throw std::invalid_argument("contraction_check: densities live on different grids");
  const std::size_t n = h1.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i)
    diff[i] = h1.ys()[i] - h2.ys()[i];
  const auto image = apply_B2_values(h1.xs(), diff, policy);
  const auto w = h1.quadrature_weights();
  double before = 0.0, after = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    before += w[i] * std::abs(diff[i]);
    after += w[i] * std::abs(image[i]);
  }
  return {after, before};
}

MembershipReport check_k1_surface(const GridFunction& g, double tolerance) {
  return check_tail_shape(g, tolerance);
}

} // namespace bgcd
