#include "bgcd/fixpoint.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace bgcd {

ConvergenceError::ConvergenceError(IterationHistory history)
    : std::runtime_error("no convergence after " + std::to_string(history.iterations()) +
                         " iterations"),
      history_(std::move(history)) {}

IterationHistory iterate_to_fixpoint(std::size_t grid_size, const TruncationPolicy& policy,
                                     double tol, int max_iter) {
  if (!(tol > 0.0))
    throw std::invalid_argument("iterate_to_fixpoint: tol must be positive");
  if (max_iter < 1)
    throw std::invalid_argument("iterate_to_fixpoint: max_iter must be at least 1");

  IterationHistory h;
  h.tol = tol;
  h.K = policy.K();
  TailFunction current = initial_tail(grid_size, kIteratedTolerance);
  DensityFunction current_density = discrete_derivative(current);
  h.iterates.push_back(current);

  for (int n = 0; n < max_iter; ++n) {
    TailFunction next = apply_F(current, policy);
    const auto k2 = check_k2(next.function(), kIteratedTolerance);
    if (!k2.member) {
      std::ostringstream os;
      os << "iterate " << n + 1 << " left the K2 band at x = " << k2.worst_x
         << " (margin " << k2.worst_margin << ")";
      throw std::logic_error(os.str());
    }
    DensityFunction next_density = discrete_derivative(next);

    h.sup_deltas.push_back(sup_distance(next, current));
    h.l1_derivative_deltas.push_back(l1_distance(next_density, current_density));
    h.k2_margins.push_back(k2.worst_margin);
    if (h.iterates.size() <= kStoredIterates)
      h.iterates.push_back(next);

    current = std::move(next);
    current_density = std::move(next_density);
    if (h.sup_deltas.back() < tol) {
      h.converged_at = h.sup_deltas.size();
      break;
    }
  }
  h.latest = current;
  if (!h.converged_at)
    throw ConvergenceError(std::move(h));
  return h;
}

BrentConstant compute_b(const TailFunction& g) {
  const auto xs = g.xs();
  const auto ys = g.ys();
  const std::size_t n = xs.size();
  if (std::abs(ys.back()) > kIteratedTolerance)
    throw std::domain_error("compute_b: g(1) is not 0, the integrand is singular at 1");

  // g(x)/(1-x) -> -g'(1); one-sided quadratic difference at x = 1.
  const double h1 = xs[n - 1] - xs[n - 2];
  const double h2 = xs[n - 2] - xs[n - 3];
  const double slope = ys[n - 3] * h1 / (h2 * (h1 + h2)) -
                       ys[n - 2] * (h1 + h2) / (h1 * h2) +
                       ys[n - 1] * (2.0 * h1 + h2) / (h1 * (h1 + h2));
  const double endpoint = -slope;

  auto integrand = [&](std::size_t i) {
    return i + 1 == n ? endpoint : ys[i] / (1.0 - xs[i]);
  };
  double s = 0.0;
  for (std::size_t i = 1; i < n; ++i)
    s += 0.5 * (xs[i] - xs[i - 1]) * (integrand(i) + integrand(i - 1));
  return {2.0 + s / std::numbers::ln2, n, endpoint};
}

DensityFunction extract_limit_density(const IterationHistory& history) {
  if (!history.converged_at)
    throw std::logic_error("extract_limit_density: iteration did not converge");
  return discrete_derivative(history.final_iterate());
}

std::optional<double> contraction_ratio_estimate(const std::vector<double>& sup_deltas,
                                                 double floor) {
  double log_sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i + 1 < sup_deltas.size(); ++i) {
    if (sup_deltas[i] <= floor || sup_deltas[i + 1] <= floor)
      break;
    log_sum += std::log(sup_deltas[i + 1] / sup_deltas[i]);
    ++count;
  }
  if (count == 0)
    return std::nullopt;
  return std::exp(log_sum / count);
}

std::optional<double> contraction_ratio_estimate(const IterationHistory& history) {
  return contraction_ratio_estimate(history.sup_deltas,
                                    history.final_iterate().function().max_spacing());
}

std::vector<double> derivative_error_sequence(const IterationHistory& history) {
  const DensityFunction limit = discrete_derivative(history.final_iterate());
  std::vector<double> u;
  u.reserve(history.iterates.size());
  for (const auto& g : history.iterates)
    u.push_back(l1_distance(limit, discrete_derivative(g)));
  return u;
}

} // namespace bgcd
