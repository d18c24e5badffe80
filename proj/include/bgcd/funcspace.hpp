#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bgcd {

/// Shape-check tolerance for analytically sampled inputs.
inline constexpr double kAnalyticTolerance = 1e-9;
/// Shape-check tolerance for functions produced by repeated operator application.
inline constexpr double kIteratedTolerance = 1e-6;
/// Default node count of the iteration grid (h = 2^-12).
inline constexpr std::size_t kDefaultGridSize = 4097;

namespace detail {

// Locates the cell [xs[i], xs[i+1]] containing x. Uses O(1) arithmetic on
// uniform grids and binary search otherwise.
class CellLocator {
public:
  CellLocator() = default;
  explicit CellLocator(std::span<const double> xs);

  // Returns i with xs[i] <= x < xs[i+1]; x is clamped into [xs.front(), xs.back()].
  // At x == xs.back() returns size-2.
  std::size_t locate(std::span<const double> xs, double x) const noexcept;
  bool uniform() const noexcept { return uniform_; }

private:
  bool uniform_ = false;
  double origin_ = 0.0;
  double inv_step_ = 0.0;
};

// Piecewise-linear interpolation, exact at nodes. x outside the node range is
// clamped to the end values.
double interpolate(std::span<const double> xs, std::span<const double> ys,
                   const CellLocator& loc, double x) noexcept;

} // namespace detail

/// A real function on [0,1] sampled on ascending nodes (first 0, last 1) and
/// evaluated between nodes by piecewise-linear interpolation.
class GridFunction {
public:
  GridFunction(std::vector<double> xs, std::vector<double> ys);

  /// Samples `f` on `n_nodes` uniformly spaced nodes i/(n_nodes-1).
  template <class F>
  static GridFunction sample(std::size_t n_nodes, F&& f) {
    auto xs = uniform_nodes(n_nodes);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
      ys[i] = f(xs[i]);
    return GridFunction(std::move(xs), std::move(ys));
  }

  static std::vector<double> uniform_nodes(std::size_t n_nodes);

  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> ys() const noexcept { return ys_; }
  std::size_t size() const noexcept { return xs_.size(); }
  bool uniform() const noexcept { return locator_.uniform(); }
  double max_spacing() const noexcept;

  /// Interpolated value; throws std::domain_error for x outside [0,1].
  double eval(double x) const;
  /// Interpolated value with x clamped into [0,1]; for internal callers whose
  /// arguments are in range by construction.
  double interpolate(double x) const noexcept;

  /// Same grid, new values.
  GridFunction with_values(std::vector<double> ys) const;

private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  detail::CellLocator locator_;
};

double eval(const GridFunction& f, double x);

/// Outcome of a set-membership check with the worst observed margin.
struct MembershipReport {
  bool member = true;
  double worst_margin = 0.0; ///< most negative (or smallest) slack seen
  double worst_x = 0.0;      ///< where it was seen
  std::string reason;        ///< empty when member
};

/// Endpoint values 1 and 0, nonincreasing and convex, each within `tolerance`.
/// Convexity is checked on slope increments scaled by the local spacing, which
/// reduces to second differences on a uniform grid.
MembershipReport check_tail_shape(const GridFunction& g, double tolerance);

/// A survival function on [0,1]: g(0)=1, g(1)=0, nonincreasing and convex
/// (all within `tolerance`). Construction validates these invariants.
class TailFunction {
public:
  explicit TailFunction(GridFunction g, double tolerance = kAnalyticTolerance);

  const GridFunction& function() const noexcept { return g_; }
  double tolerance() const noexcept { return tolerance_; }
  std::span<const double> xs() const noexcept { return g_.xs(); }
  std::span<const double> ys() const noexcept { return g_.ys(); }
  std::size_t size() const noexcept { return g_.size(); }
  double eval(double x) const { return g_.eval(x); }

private:
  GridFunction g_;
  double tolerance_;
};

/// g_0(x) = 1 - x on a uniform grid.
TailFunction initial_tail(std::size_t n_nodes = kDefaultGridSize,
                          double tolerance = kIteratedTolerance);

/// A nonnegative density on (eps, 1], eps = xs.front() > 0. Below the first
/// node it extends by the constant ys.front(); integrals include that cell.
class DensityFunction {
public:
  DensityFunction(std::vector<double> xs, std::vector<double> ys);

  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> ys() const noexcept { return ys_; }
  std::size_t size() const noexcept { return xs_.size(); }
  double eps() const noexcept { return xs_.front(); }

  /// Value at x in [0,1]; constant extension on [0, eps].
  double interpolate(double x) const noexcept;

  /// Quadrature weights of the integral rule: eps (extension cell) plus
  /// the trapezoid on [eps, 1].
  std::vector<double> quadrature_weights() const;

  const detail::CellLocator& locator() const noexcept { return locator_; }

private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  detail::CellLocator locator_;
};

/// Interior nodes of a tail grid (drops x = 0): the density grid matching it.
std::vector<double> density_nodes(std::span<const double> tail_xs);

/// Samples `f` on the density grid i/n, i = 1..n.
template <class F>
DensityFunction sample_density(std::size_t n, F&& f) {
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = static_cast<double>(i + 1) / static_cast<double>(n);
    ys[i] = f(xs[i]);
  }
  return DensityFunction(std::move(xs), std::move(ys));
}

/// Integral of a density under its quadrature rule.
double integral(const DensityFunction& h);

/// Trapezoidal integral of a grid function over [0,1].
double integral(const GridFunction& f);

/// max |f - g| over the union of both grids (the exact sup of the
/// piecewise-linear difference).
double sup_distance(const GridFunction& f, const GridFunction& g);
double sup_distance(const TailFunction& f, const TailFunction& g);

/// Integral of |f - g|; grids must match (std::invalid_argument otherwise).
double l1_distance(const DensityFunction& f, const DensityFunction& g);

/// -g' on the interior nodes: central differences inside, second-order
/// one-sided difference at x = 1, negatives clamped to 0.
DensityFunction discrete_derivative(const TailFunction& g);

/// Resamples a density onto new nodes (all > 0) by interpolation.
DensityFunction resample(const DensityFunction& h, std::span<const double> xs);

/// max over node pairs of |g(x) - g(y)| / |x - y|^exponent.
double holder_seminorm(const GridFunction& g, double exponent = 0.5);

/// Lower edge of the K_2 band, 1 + (3/2) x log2 x - 5x (1 at x = 0).
double k2_lower_bound(double x) noexcept;

/// 1 + (3/2) x log2 x - 5x <= g(x) <= 1 - x at every node, within `tolerance`.
MembershipReport check_k2(const GridFunction& g, double tolerance = kAnalyticTolerance);

} // namespace bgcd
