#pragma once

#include "bgcd/funcspace.hpp"
#include "bgcd/operators.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace bgcd {

/// Iterates beyond this index are not stored (the latest one always is).
inline constexpr std::size_t kStoredIterates = 50;

struct IterationHistory {
  std::vector<TailFunction> iterates;       ///< g_0, g_1, ... up to g_kStoredIterates
  std::vector<double> sup_deltas;           ///< ||g_{n+1} - g_n||_inf
  std::vector<double> l1_derivative_deltas; ///< ||g'_{n+1} - g'_n||_1
  std::vector<double> k2_margins;           ///< worst K_2 margin of g_{n+1}
  std::optional<std::size_t> converged_at;  ///< number of F applications when converged
  double tol = 0.0;
  int K = 0;

  std::size_t iterations() const noexcept { return sup_deltas.size(); }
  const TailFunction& final_iterate() const { return *latest; }

  std::optional<TailFunction> latest; ///< the last iterate computed
};

/// Thrown when the iteration hits max_iter; carries what was computed.
class ConvergenceError : public std::runtime_error {
public:
  explicit ConvergenceError(IterationHistory history);
  const IterationHistory& history() const noexcept { return history_; }

private:
  IterationHistory history_;
};

/// g_0 = 1 - x, g_{n+1} = F(g_n) until the sup-norm step falls below `tol`.
/// Each new iterate is validated against the tail invariants (std::logic_error
/// on a K_2 violation beyond kIteratedTolerance). Throws ConvergenceError
/// after `max_iter` applications without convergence.
IterationHistory iterate_to_fixpoint(std::size_t grid_size = kDefaultGridSize,
                                     const TruncationPolicy& policy = TruncationPolicy(),
                                     double tol = 1e-10, int max_iter = 200);

struct BrentConstant {
  double b;
  std::size_t quadrature_grid;
  double endpoint_limit; ///< -g'(1), the integrand value used at x = 1
};

/// b = 2 + (1/ln 2) * integral of g(x)/(1-x), trapezoid on the grid of g.
/// Throws std::domain_error if |g(1)| exceeds kIteratedTolerance, whatever
/// tolerance g itself carries.
BrentConstant compute_b(const TailFunction& g);

/// -g'_inf from a converged history; std::logic_error if not converged.
DensityFunction extract_limit_density(const IterationHistory& history);

/// Geometric mean of consecutive sup_delta ratios, using only steps whose
/// deltas both exceed `floor`. nullopt if fewer than one such ratio exists.
std::optional<double> contraction_ratio_estimate(const std::vector<double>& sup_deltas,
                                                 double floor);
/// Same with floor = grid spacing of the history.
std::optional<double> contraction_ratio_estimate(const IterationHistory& history);

/// u_n = ||g'_inf - g'_n||_1 for every stored iterate, with g_inf the final one.
std::vector<double> derivative_error_sequence(const IterationHistory& history);

} // namespace bgcd
