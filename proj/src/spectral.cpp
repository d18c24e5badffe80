#include "bgcd/spectral.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "bgcd/csv.hpp"

namespace bgcd {

DiscretizedOperator discretize_B2(std::size_t n, const TruncationPolicy& policy) {
  if (n < 64)
    throw std::invalid_argument("discretize_B2: n must be at least 64");
  DiscretizedOperator op;
  op.n = n;
  op.K = policy.K();
  op.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    op.nodes[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  const std::vector<double> ones(n, 1.0);
  const DensityFunction carrier(op.nodes, ones);
  const auto w = carrier.quadrature_weights();
  op.quad_weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(n));

  const auto xs = carrier.xs();
  const auto& loc = carrier.locator();
  op.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto scatter = [&](Eigen::Index row, double y, double weight) {
    if (y <= xs.front()) {
      op.entries(row, 0) += weight;
      return;
    }
    if (y >= xs.back()) {
      op.entries(row, static_cast<Eigen::Index>(n - 1)) += weight;
      return;
    }
    const std::size_t j = loc.locate(xs, y);
    const double t = (y - xs[j]) / (xs[j + 1] - xs[j]);
    op.entries(row, static_cast<Eigen::Index>(j)) += weight * (1.0 - t);
    op.entries(row, static_cast<Eigen::Index>(j + 1)) += weight * t;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i];
    const auto row = static_cast<Eigen::Index>(i);
    for (int k = policy.K(); k >= 1; --k) {
      const double p = std::ldexp(1.0, k);
      const double w1 = 1.0 / (x + p);
      const double w2 = 1.0 / (1.0 + p * x);
      scatter(row, x * w1, w1 * w1);
      scatter(row, w2, w2 * w2);
    }
  }
  return op;
}

void write_matrix_csv(std::ostream& out, const DiscretizedOperator& op) {
  for (Eigen::Index i = 0; i < op.entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < op.entries.cols(); ++j) {
      if (j > 0)
        out << ',';
      out << format_double(op.entries(i, j));
    }
    out << '\n';
  }
}

DensityFunction LeadingEigen::density(const DiscretizedOperator& op) const {
  std::vector<double> ys(vector.data(), vector.data() + vector.size());
  for (double& y : ys)
    y = std::max(y, 0.0);
  return DensityFunction(op.nodes, std::move(ys));
}

LeadingEigen leading_eigen(const DiscretizedOperator& op, double tol, int max_iter) {
  const Eigen::VectorXd& w = op.quad_weights;
  auto l1 = [&](const Eigen::VectorXd& v) { return w.dot(v.cwiseAbs()); };

  LeadingEigen out;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(op.n));
  v /= l1(v);
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd Av = op.entries * v;
    const double lambda = w.dot(Av) / w.dot(v);
    const double residual = l1(Av - lambda * v) / l1(v);
    out.residual_history.push_back(residual);
    out.lambda1 = lambda;
    out.residual1 = residual;
    out.iterations = it;
    v = Av / l1(Av);
    if (residual < tol) {
      out.vector = v / w.dot(v);
      return out;
    }
  }
  throw SpectralError("leading_eigen: no convergence after " + std::to_string(max_iter) +
                          " iterations (residual " + std::to_string(out.residual1) + ")",
                      out.residual_history);
}

GrowthEstimate deflated_growth(const Eigen::MatrixXd& A, const Eigen::VectorXd& phi,
                               const Eigen::VectorXd& w, Eigen::VectorXd start,
                               const std::function<double(const Eigen::VectorXd&)>& norm,
                               int burn_in, int window) {
  if (window < 1 || burn_in < 0)
    throw std::invalid_argument("deflated_growth: bad window");
  const double wphi = w.dot(phi);
  auto project = [&](Eigen::VectorXd& v) { v -= phi * (w.dot(v) / wphi); };

  GrowthEstimate g;
  project(start);
  Eigen::VectorXd v = start / norm(start);
  std::vector<double> logs;
  for (int it = 0; it < burn_in + 2 * window; ++it) {
    Eigen::VectorXd next = A * v;
    project(next);
    const double r = norm(next);
    g.ratios.push_back(r);
    logs.push_back(std::log(r));
    v = next / r;
  }
  g.iterations = burn_in + 2 * window;

  // Window estimates at every offset across one further window length.
  std::vector<double> estimates;
  for (int s = burn_in; s <= burn_in + window; ++s) {
    double sum = 0.0;
    for (int i = s; i < s + window; ++i)
      sum += logs[static_cast<std::size_t>(i)];
    estimates.push_back(sum / window);
  }
  double mean = 0.0;
  for (double e : estimates)
    mean += e;
  mean /= static_cast<double>(estimates.size());
  g.modulus = std::exp(mean);
  const auto [lo, hi] = std::ranges::minmax(estimates);
  g.spread = (std::exp(hi) - std::exp(lo)) / g.modulus;
  return g;
}

namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;
constexpr int kDyadicLevels = 60;

// Chebyshev points of the first kind mapped to (0,1).
std::vector<double> chebyshev_points(int count) {
  std::vector<double> x(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    x[static_cast<std::size_t>(i)] =
        0.5 * (1.0 + std::cos(std::numbers::pi * (i + 0.5) / count));
  return x;
}

Eigen::VectorXd log_chebyshev_basis(int m, double x) {
  Eigen::VectorXd b(2 * m);
  const double t = 2.0 * x - 1.0;
  const double lx = std::log(x);
  double prev = 1.0, cur = t;
  for (int j = 0; j < m; ++j) {
    double T;
    if (j == 0) {
      T = 1.0;
    } else if (j == 1) {
      T = t;
    } else {
      T = 2.0 * t * cur - prev;
      prev = cur;
      cur = T;
    }
    b(j) = T;
    b(m + j) = T * lx;
  }
  return b;
}

Eigen::VectorXd power_vector(const Eigen::MatrixXd& M, Eigen::VectorXd v, int iterations) {
  for (int i = 0; i < iterations; ++i) {
    v = M * v;
    v /= v.cwiseAbs().maxCoeff();
  }
  return v;
}

} // namespace

LogChebyshevOperator::LogChebyshevOperator(int m, const TruncationPolicy& policy) : m_(m) {
  if (m < 2 || m > kMaxCollocationDegree)
    throw std::invalid_argument("LogChebyshevOperator: degree must lie in [2, 10]");
  const int dim = 2 * m;
  const auto pts = chebyshev_points(6 * m);
  const auto rows = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd E(rows, dim), B(rows, dim);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double x = pts[static_cast<std::size_t>(i)];
    E.row(i) = log_chebyshev_basis(m, x).transpose();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
    for (int k = policy.K(); k >= 1; --k) {
      const double p = std::ldexp(1.0, k);
      const double w1 = 1.0 / (x + p);
      const double w2 = 1.0 / (1.0 + p * x);
      acc += w1 * w1 * log_chebyshev_basis(m, x * w1) + w2 * w2 * log_chebyshev_basis(m, w2);
    }
    B.row(i) = acc.transpose();
  }
  M_ = E.colPivHouseholderQr().solve(B);

  const auto& absc = Gauss::abscissa();
  const auto& wts = Gauss::weights();
  std::vector<double> qx, qw;
  for (int level = 0; level < kDyadicLevels; ++level) {
    const double b = std::ldexp(1.0, -level);
    const double a = 0.5 * b;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < absc.size(); ++i) {
      qx.push_back(mid - half * absc[i]);
      qw.push_back(half * wts[i]);
      if (absc[i] != 0.0) {
        qx.push_back(mid + half * absc[i]);
        qw.push_back(half * wts[i]);
      }
    }
  }
  quad_basis_.resize(static_cast<Eigen::Index>(qx.size()), dim);
  quad_w_.resize(static_cast<Eigen::Index>(qx.size()));
  for (std::size_t i = 0; i < qx.size(); ++i) {
    quad_basis_.row(static_cast<Eigen::Index>(i)) = log_chebyshev_basis(m, qx[i]).transpose();
    quad_w_(static_cast<Eigen::Index>(i)) = qw[i];
  }
  integrals_ = quad_basis_.transpose() * quad_w_;
}

Eigen::VectorXd LogChebyshevOperator::basis(double x) const {
  if (!(x > 0.0 && x <= 1.0))
    throw std::domain_error("LogChebyshevOperator::basis: x outside (0,1]");
  return log_chebyshev_basis(m_, x);
}

double LogChebyshevOperator::l1_norm(const Eigen::VectorXd& c) const {
  return quad_w_.dot((quad_basis_ * c).cwiseAbs());
}

SpectralEstimate subdominant_modulus(const DiscretizedOperator& op, const LeadingEigen& leading,
                                     int collocation_degree) {
  SpectralEstimate est;
  est.grid = op.n;
  est.K = op.K;
  est.lambda1 = leading.lambda1;
  est.residual1 = leading.residual1;
  est.iterations = leading.iterations;
  est.collocation_degree = collocation_degree;

  const Eigen::VectorXd& w = op.quad_weights;
  Eigen::VectorXd start(static_cast<Eigen::Index>(op.n));
  for (std::size_t i = 0; i < op.n; ++i)
    start(static_cast<Eigen::Index>(i)) = std::cos(3.0 * std::numbers::pi * op.nodes[i]) + op.nodes[i];
  const auto hat = deflated_growth(op.entries, leading.vector, w, start,
                                   [&](const Eigen::VectorXd& v) { return w.dot(v.cwiseAbs()); });
  est.hat_lambda2_modulus = hat.modulus;
  est.hat_window_spread = hat.spread;

  const LogChebyshevOperator lc(collocation_degree, TruncationPolicy(op.K));
  const Eigen::Index dim = lc.matrix().rows();
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(dim);
  e0(0) = 1.0;
  const Eigen::VectorXd phi = power_vector(lc.matrix(), e0, 200);
  const auto col = deflated_growth(lc.matrix(), phi, lc.integrals(), Eigen::VectorXd::Ones(dim),
                                   [&](const Eigen::VectorXd& c) { return lc.l1_norm(c); });
  est.lambda2_modulus = col.modulus;
  est.window_spread = col.spread;
  if (col.spread > 0.5)
    throw SpectralError("complex-pair window too short", col.ratios);
  return est;
}

} // namespace bgcd
