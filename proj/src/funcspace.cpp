#include "bgcd/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bgcd {

namespace detail {

CellLocator::CellLocator(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2)
    return;
  const double step = (xs.back() - xs.front()) / static_cast<double>(n - 1);
  bool uniform = step > 0.0;
  for (std::size_t i = 0; uniform && i < n; ++i) {
    const double expected = xs.front() + step * static_cast<double>(i);
    uniform = std::abs(xs[i] - expected) <= 1e-12 * step;
  }
  uniform_ = uniform;
  origin_ = xs.front();
  inv_step_ = uniform ? 1.0 / step : 0.0;
}

std::size_t CellLocator::locate(std::span<const double> xs, double x) const noexcept {
  const std::size_t last_cell = xs.size() - 2;
  if (x <= xs.front())
    return 0;
  if (x >= xs.back())
    return last_cell;
  std::size_t i;
  if (uniform_) {
    const double t = (x - origin_) * inv_step_;
    i = std::min(static_cast<std::size_t>(t), last_cell);
    // floating rounding can put us one cell off
    while (i > 0 && x < xs[i])
      --i;
    while (i < last_cell && x >= xs[i + 1])
      ++i;
  } else {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    i = std::min(static_cast<std::size_t>(it - xs.begin()) - 1, last_cell);
  }
  return i;
}

double interpolate(std::span<const double> xs, std::span<const double> ys,
                   const CellLocator& loc, double x) noexcept {
  if (x <= xs.front())
    return ys.front();
  if (x >= xs.back())
    return ys.back();
  const std::size_t i = loc.locate(xs, x);
  const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + t * (ys[i + 1] - ys[i]);
}

} // namespace detail

namespace {

void require_ascending(std::span<const double> xs, const char* what) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      throw std::invalid_argument(std::string(what) + ": nodes must be strictly increasing");
}

MembershipReport fail(double margin, double x, std::string reason) {
  return {false, margin, x, std::move(reason)};
}

} // namespace

GridFunction::GridFunction(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size())
    throw std::invalid_argument("GridFunction: xs and ys differ in length");
  if (xs_.size() < 3)
    throw std::invalid_argument("GridFunction: need at least 3 nodes");
  if (xs_.front() != 0.0 || xs_.back() != 1.0)
    throw std::invalid_argument("GridFunction: grid must start at 0 and end at 1");
  require_ascending(xs_, "GridFunction");
  for (double y : ys_)
    if (!std::isfinite(y))
      throw std::invalid_argument("GridFunction: non-finite value");
  locator_ = detail::CellLocator(xs_);
}

std::vector<double> GridFunction::uniform_nodes(std::size_t n_nodes) {
  if (n_nodes < 3)
    throw std::invalid_argument("grid needs at least 3 nodes");
  std::vector<double> xs(n_nodes);
  const double n = static_cast<double>(n_nodes - 1);
  for (std::size_t i = 0; i < n_nodes; ++i)
    xs[i] = static_cast<double>(i) / n;
  return xs;
}

double GridFunction::max_spacing() const noexcept {
  double m = 0.0;
  for (std::size_t i = 1; i < xs_.size(); ++i)
    m = std::max(m, xs_[i] - xs_[i - 1]);
  return m;
}

double GridFunction::eval(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << "GridFunction::eval: x = " << x << " outside [0,1]";
    throw std::domain_error(os.str());
  }
  return interpolate(x);
}

double GridFunction::interpolate(double x) const noexcept {
  return detail::interpolate(xs_, ys_, locator_, x);
}

GridFunction GridFunction::with_values(std::vector<double> ys) const {
  return GridFunction(xs_, std::move(ys));
}

double eval(const GridFunction& f, double x) { return f.eval(x); }

MembershipReport check_tail_shape(const GridFunction& g, double tolerance) {
  const auto xs = g.xs();
  const auto ys = g.ys();
  const std::size_t n = ys.size();
  if (std::abs(ys.front() - 1.0) > tolerance)
    return fail(-std::abs(ys.front() - 1.0), 0.0, "g(0) != 1");
  if (std::abs(ys.back()) > tolerance)
    return fail(-std::abs(ys.back()), 1.0, "g(1) != 0");

  MembershipReport report;
  report.worst_margin = tolerance;
  for (std::size_t i = 1; i < n; ++i) {
    const double rise = ys[i] - ys[i - 1];
    if (rise > tolerance)
      return fail(-rise, xs[i], "not nonincreasing");
    report.worst_margin = std::min(report.worst_margin, -rise);
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double left = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
    const double right = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    const double second = (right - left) * 0.5 * (xs[i + 1] - xs[i - 1]);
    if (second < -tolerance)
      return fail(second, xs[i], "not convex");
    if (second < report.worst_margin) {
      report.worst_margin = second;
      report.worst_x = xs[i];
    }
  }
  return report;
}

TailFunction::TailFunction(GridFunction g, double tolerance)
    : g_(std::move(g)), tolerance_(tolerance) {
  if (!(tolerance >= 0.0))
    throw std::invalid_argument("TailFunction: tolerance must be nonnegative");
  const auto report = check_tail_shape(g_, tolerance_);
  if (!report.member) {
    std::ostringstream os;
    os << "TailFunction: " << report.reason << " near x = " << report.worst_x
       << " (margin " << report.worst_margin << ")";
    throw std::invalid_argument(os.str());
  }
}

TailFunction initial_tail(std::size_t n_nodes, double tolerance) {
  return TailFunction(GridFunction::sample(n_nodes, [](double x) { return 1.0 - x; }),
                      tolerance);
}

DensityFunction::DensityFunction(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size())
    throw std::invalid_argument("DensityFunction: xs and ys differ in length");
  if (xs_.size() < 2)
    throw std::invalid_argument("DensityFunction: need at least 2 nodes");
  if (!(xs_.front() > 0.0) || xs_.back() != 1.0)
    throw std::invalid_argument("DensityFunction: grid must lie in (0,1] and end at 1");
  require_ascending(xs_, "DensityFunction");
  for (double y : ys_)
    if (!(y >= 0.0) || !std::isfinite(y))
      throw std::invalid_argument("DensityFunction: values must be finite and nonnegative");
  locator_ = detail::CellLocator(xs_);
}

double DensityFunction::interpolate(double x) const noexcept {
  return detail::interpolate(xs_, ys_, locator_, x);
}

std::vector<double> DensityFunction::quadrature_weights() const {
  const std::size_t n = xs_.size();
  std::vector<double> w(n, 0.0);
  w[0] = xs_[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double half = 0.5 * (xs_[i] - xs_[i - 1]);
    w[i - 1] += half;
    w[i] += half;
  }
  return w;
}

std::vector<double> density_nodes(std::span<const double> tail_xs) {
  return {tail_xs.begin() + 1, tail_xs.end()};
}

double integral(const DensityFunction& h) {
  const auto w = h.quadrature_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    s += w[i] * h.ys()[i];
  return s;
}

double integral(const GridFunction& f) {
  const auto xs = f.xs();
  const auto ys = f.ys();
  double s = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    s += 0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]);
  return s;
}

double sup_distance(const GridFunction& f, const GridFunction& g) {
  double m = 0.0;
  for (double x : f.xs())
    m = std::max(m, std::abs(f.interpolate(x) - g.interpolate(x)));
  for (double x : g.xs())
    m = std::max(m, std::abs(f.interpolate(x) - g.interpolate(x)));
  return m;
}

double sup_distance(const TailFunction& f, const TailFunction& g) {
  return sup_distance(f.function(), g.function());
}

double l1_distance(const DensityFunction& f, const DensityFunction& g) {
  if (!std::ranges::equal(f.xs(), g.xs()))
    throw std::invalid_argument("l1_distance: densities live on different grids");
  const auto w = f.quadrature_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    s += w[i] * std::abs(f.ys()[i] - g.ys()[i]);
  return s;
}

DensityFunction discrete_derivative(const TailFunction& g) {
  const auto xs = g.xs();
  const auto ys = g.ys();
  const std::size_t n = xs.size();
  if (n < 3)
    throw std::invalid_argument("discrete_derivative: need at least 3 nodes");

  std::vector<double> out_x(xs.begin() + 1, xs.end());
  std::vector<double> out_y(n - 1);
  for (std::size_t i = 1; i + 1 < n; ++i)
    out_y[i - 1] = (ys[i - 1] - ys[i + 1]) / (xs[i + 1] - xs[i - 1]);

  // Quadratic through the last three nodes, differentiated at x = 1.
  const double h1 = xs[n - 1] - xs[n - 2];
  const double h2 = xs[n - 2] - xs[n - 3];
  const double slope = ys[n - 3] * h1 / (h2 * (h1 + h2)) -
                       ys[n - 2] * (h1 + h2) / (h1 * h2) +
                       ys[n - 1] * (2.0 * h1 + h2) / (h1 * (h1 + h2));
  out_y[n - 2] = -slope;

  for (double& v : out_y)
    v = std::max(v, 0.0);
  return DensityFunction(std::move(out_x), std::move(out_y));
}

DensityFunction resample(const DensityFunction& h, std::span<const double> xs) {
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    ys[i] = h.interpolate(xs[i]);
  return DensityFunction({xs.begin(), xs.end()}, std::move(ys));
}

double holder_seminorm(const GridFunction& g, double exponent) {
  const auto xs = g.xs();
  const auto ys = g.ys();
  const std::size_t n = xs.size();
  const bool root = exponent == 0.5;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = xs[j] - xs[i];
      const double denom = root ? std::sqrt(dx) : std::pow(dx, exponent);
      best = std::max(best, std::abs(ys[j] - ys[i]) / denom);
    }
  }
  return best;
}

double k2_lower_bound(double x) noexcept {
  if (x <= 0.0)
    return 1.0;
  return 1.0 + 1.5 * x * std::log2(x) - 5.0 * x;
}

MembershipReport check_k2(const GridFunction& g, double tolerance) {
  MembershipReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  const auto xs = g.xs();
  const auto ys = g.ys();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double below = ys[i] - k2_lower_bound(xs[i]);
    const double above = (1.0 - xs[i]) - ys[i];
    const double margin = std::min(below, above);
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      report.worst_x = xs[i];
    }
  }
  if (report.worst_margin < -tolerance) {
    report.member = false;
    report.reason = "outside the K2 band";
  }
  return report;
}

} // namespace bgcd
