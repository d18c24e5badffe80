#pragma once

#include "bgcd/funcspace.hpp"
#include "bgcd/operators.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace bgcd {

inline constexpr std::size_t kSpectralGrid = 1024;
inline constexpr int kCollocationDegree = 10;
/// Above this the least-squares fit turns ill-conditioned and grows spurious
/// eigenvalues of modulus > 1.
inline constexpr int kMaxCollocationDegree = 10;

/// B_2 on the hat basis of the density grid i/n, i = 1..n: column j holds
/// apply_B2 of the j-th hat function at the nodes. The first hat carries the
/// constant extension below 1/n, exactly as DensityFunction does.
struct DiscretizedOperator {
  std::size_t n = 0;
  int K = 0;
  std::vector<double> nodes;
  Eigen::MatrixXd entries;
  Eigen::VectorXd quad_weights; ///< the DensityFunction quadrature on the nodes
};

/// Throws std::invalid_argument for n < 64.
DiscretizedOperator discretize_B2(std::size_t n, const TruncationPolicy& policy = TruncationPolicy());

/// Writes the matrix as CSV, one row per line, 17 significant digits.
void write_matrix_csv(std::ostream& out, const DiscretizedOperator& op);

struct LeadingEigen {
  double lambda1 = 0.0;
  Eigen::VectorXd vector; ///< nodal values, unit integral under quad_weights
  double residual1 = 0.0; ///< ||A v - lambda1 v||_1 / ||v||_1
  int iterations = 0;
  std::vector<double> residual_history;

  DensityFunction density(const DiscretizedOperator& op) const;
};

/// Thrown when an iteration does not settle; carries the residuals seen.
class SpectralError : public std::runtime_error {
public:
  SpectralError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

private:
  std::vector<double> history_;
};

/// Power iteration from the uniform density, L1-normalised each step.
/// lambda1 = w.(A v) / w.v with w the quadrature weights.
LeadingEigen leading_eigen(const DiscretizedOperator& op, double tol = 1e-12, int max_iter = 500);

/// Norm-growth estimate of the dominant modulus of a deflated iteration.
struct GrowthEstimate {
  double modulus = 0.0; ///< mean of the sliding window estimates (geometric)
  double spread = 0.0;  ///< (max - min) / modulus of the sliding window estimates
  int iterations = 0;
  std::vector<double> ratios;
};

/// Iterates v <- P A v with P = I - phi w^T / (w^T phi), normalising by
/// `norm`. After `burn_in` steps, the geometric mean of the growth ratios over
/// `window` consecutive steps is taken at every offset across one more window
/// length; a complex pair makes single ratios rotate, the window means do not.
GrowthEstimate deflated_growth(const Eigen::MatrixXd& A, const Eigen::VectorXd& phi,
                               const Eigen::VectorXd& w, Eigen::VectorXd start,
                               const std::function<double(const Eigen::VectorXd&)>& norm,
                               int burn_in = 40, int window = 20);

/// B_2 on span{T_j(2x-1), T_j(2x-1) ln x : j < m}, fitted by least squares
/// at 6m Chebyshev points of (0,1). Coefficient vectors hold the T_j parts
/// first, then the T_j ln x parts.
class LogChebyshevOperator {
public:
  explicit LogChebyshevOperator(int m = kCollocationDegree,
                                const TruncationPolicy& policy = TruncationPolicy());

  int degree() const noexcept { return m_; }
  const Eigen::MatrixXd& matrix() const noexcept { return M_; }
  /// Integrals of the basis functions over (0,1).
  const Eigen::VectorXd& integrals() const noexcept { return integrals_; }

  /// Basis values at x in (0,1].
  Eigen::VectorXd basis(double x) const;
  /// Function value of coefficient vector c at x.
  double value(const Eigen::VectorXd& c, double x) const { return basis(x).dot(c); }
  /// L1 norm over (0,1) by Gauss-Legendre on dyadic intervals.
  double l1_norm(const Eigen::VectorXd& c) const;

private:
  int m_;
  Eigen::MatrixXd M_;
  Eigen::VectorXd integrals_;
  Eigen::MatrixXd quad_basis_; ///< basis at the L1 quadrature nodes
  Eigen::VectorXd quad_w_;
};

struct SpectralEstimate {
  std::size_t grid = 0;
  int K = 0;
  double lambda1 = 0.0;
  double lambda2_modulus = 0.0; ///< from the log-Chebyshev operator
  double residual1 = 0.0;
  int iterations = 0;           ///< power iterations for lambda1
  double window_spread = 0.0;
  int collocation_degree = 0;
  double hat_lambda2_modulus = 0.0; ///< same estimator on the hat-basis matrix
  double hat_window_spread = 0.0;
};

/// Leading pair from the hat-basis matrix, subdominant modulus from the
/// log-Chebyshev operator. Throws SpectralError if the collocation window
/// spread exceeds 50% ("complex-pair window too short").
SpectralEstimate subdominant_modulus(const DiscretizedOperator& op, const LeadingEigen& leading,
                                     int collocation_degree = kCollocationDegree);

} // namespace bgcd
