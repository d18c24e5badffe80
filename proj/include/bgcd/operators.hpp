#pragma once

#include "bgcd/funcspace.hpp"

#include <utility>
#include <vector>

namespace bgcd {

/// Number K of series terms kept in F and B_2; the dropped tail is at most 2^-K.
class TruncationPolicy {
public:
  /// Throws std::invalid_argument unless 1 <= K <= 62.
  explicit TruncationPolicy(int K = 60);

  int K() const noexcept { return K_; }
  double tail_bound() const noexcept { return tail_bound_; }

private:
  int K_;
  double tail_bound_;
};

/// The truncated series of F at every node of `g`, with no endpoint forcing.
/// Linear in g; terms are summed from k = K down to 1.
GridFunction apply_F_series(const GridFunction& g, const TruncationPolicy& policy);

/// F(g) with the endpoint values set to exactly 1 and 0. The result carries
/// the input tolerance and is checked against the tail invariants.
TailFunction apply_F(const TailFunction& g, const TruncationPolicy& policy);

/// B_2 applied to nodal values `ys` on density nodes `xs` (constant extension
/// below xs.front()). No sign check; used where linearity over signed inputs
/// is needed.
std::vector<double> apply_B2_values(const DensityFunction& h, const TruncationPolicy& policy);
std::vector<double> apply_B2_values(std::span<const double> xs, std::span<const double> ys,
                                    const TruncationPolicy& policy);

/// B_2(h) on the grid of `h`. Throws std::invalid_argument if any value of h
/// is below -tolerance (DensityFunction already rules out negatives, so this
/// only guards the overload taking raw values).
DensityFunction apply_B2(const DensityFunction& h, const TruncationPolicy& policy);

/// ||F g1 - F g2||_inf / ||g1 - g2||_inf. Throws std::invalid_argument if g1 == g2.
double operator_norm_bound_check(const TailFunction& g1, const TailFunction& g2,
                                 const TruncationPolicy& policy);

/// (||B_2 h1 - B_2 h2||_1, ||h1 - h2||_1), computed on the signed difference.
std::pair<double, double> contraction_check(const DensityFunction& h1, const DensityFunction& h2,
                                            const TruncationPolicy& policy);

/// Endpoint values, monotonicity and convexity within `tolerance`.
MembershipReport check_k1_surface(const GridFunction& g, double tolerance = kIteratedTolerance);

} // namespace bgcd
