#pragma once

namespace bgcd {

inline constexpr int kDefaultLhsTerms = 60;
inline constexpr int kDefaultFourierTerms = 3;
inline constexpr int kDefaultAlternatingTerms = 200;

/// sum_{k=1..K} 2^-k / (1 + 2^k x), smallest term first. x = 0 gives 1 - 2^-K.
double lhs_sum(double x, int K = kDefaultLhsTerms);

/// P(y) = (2 pi / ln 2) sum_{k=1..K_P} sin(2 pi k y) / sinh(2 k pi^2 / ln 2).
double p_eval(double y, int K_P = kDefaultFourierTerms);

/// sum_{k=2..K_alt} (-1)^k 2^{k-1}/(2^{k-1}-1) x^k, term by term.
double alternating_partial_sum(double x, int K_alt);

/// The same series summed as x^2/(1+x) + sum_{k=2..K_alt} (-1)^k x^k/(2^{k-1}-1).
/// The second part converges geometrically with ratio x/2 on all of [0,1],
/// so x = 1 gives the Abel limit directly.
double alternating_sum(double x, int K_alt = kDefaultAlternatingTerms);

/// 1 + x log2 x + x P(log2 x) + x/2 - alternating_sum(x). x = 0 gives 1.
double rhs_identity(double x, int K_P = kDefaultFourierTerms,
                    int K_alt = kDefaultAlternatingTerms);

/// g_1(x) from the identity: rhs_identity(x) + sum_{j>=1} (-x)^j / (2^{j+1} - 1).
double g1_via_identity(double x, int K_P = kDefaultFourierTerms,
                       int K_alt = kDefaultAlternatingTerms);

struct MellinEvaluation {
  double x;
  double lhs;
  double rhs;
  double p_value; ///< P(log2 x); 0 at x = 0
  int K_lhs;
  int K_P;
  int K_alt;
  double truncation_bound; ///< bound on |lhs - rhs| from the dropped terms

  double residual() const noexcept { return lhs - rhs; }
};

/// Both sides at x in [0,1]; throws std::domain_error outside.
MellinEvaluation evaluate_identity(double x, int K_lhs = kDefaultLhsTerms,
                                   int K_P = kDefaultFourierTerms,
                                   int K_alt = kDefaultAlternatingTerms);

} // namespace bgcd
