#pragma once

#include <utility>
#include <vector>

namespace bgcd {

/// x -> (a x + b) / (c x + d) on [0,1] with a, b, c >= 0, d > 0, ad - bc != 0.
/// c = 0 is admitted so the identity (1,0,0,1) is representable.
class MoebiusMap {
public:
  /// Throws std::invalid_argument when the coefficients leave the class.
  MoebiusMap(double a, double b, double c, double d);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double d() const noexcept { return d_; }

  double determinant() const noexcept { return a_ * d_ - b_ * c_; }
  /// +1 (increasing, concave) or -1 (decreasing, convex).
  int sign() const noexcept { return determinant() > 0.0 ? 1 : -1; }
  double operator()(double x) const noexcept { return (a_ * x + b_) / (c_ * x + d_); }
  /// max over [0,1] of |m|; a monotone map attains it at an endpoint.
  double sup_norm() const noexcept;

private:
  double a_, b_, c_, d_;
};

/// The identity map.
MoebiusMap identity_map();

/// (ax+b)/(cx+d) at x in [0,1]; throws std::domain_error outside.
double moebius_apply(const MoebiusMap& m, double x);

/// x -> m1(m2(x)). Coefficients are rescaled by a power of two so the largest
/// lies in [1,2). Throws std::invalid_argument if the product leaves the class.
MoebiusMap moebius_compose(const MoebiusMap& m1, const MoebiusMap& m2);

/// x / (x + 2^k), 1 <= k <= 62.
MoebiusMap mu(int k);
/// 1 / (2^k x + 1), 1 <= k <= 62.
MoebiusMap nu(int k);

struct MoebiusTerm {
  int eps; ///< +1 or -1
  MoebiusMap map;
};

/// Finite sum of eps_i m_i with eps_i * sign(m_i) < 0 for every term.
class MoebiusSeries {
public:
  MoebiusSeries() = default;
  explicit MoebiusSeries(std::vector<MoebiusTerm> terms);

  /// Throws std::invalid_argument if the sign condition fails.
  void add(int eps, const MoebiusMap& m);

  const std::vector<MoebiusTerm>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  /// Sum evaluated from the last term to the first.
  double operator()(double x) const noexcept;

private:
  std::vector<MoebiusTerm> terms_;
};

/// (sum of sup norms, sum of |ad - bc| / (cd)).
std::pair<double, double> s_condition_partial_sums(const MoebiusSeries& s);

/// sum_{k=1..K} 2^-k (1/(1+2^k x) - x/(x+2^k)), summed from k = K down.
double g1_series(double x, int K = 60);

/// The same truncation of g_1 as an explicit Moebius series.
MoebiusSeries g1_moebius_series(int K);

} // namespace bgcd
