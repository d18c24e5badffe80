#include "bgcd/mellin.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace bgcd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

void require_terms(int K, const char* what) {
  if (K < 1)
    throw std::invalid_argument(std::string(what) + ": term count must be positive");
}

// 1/sinh(a) for large a without overflow.
double inv_sinh(double a) {
  const double e = std::exp(-a);
  return 2.0 * e / (1.0 - e * e);
}

} // namespace

double lhs_sum(double x, int K) {
  require_terms(K, "lhs_sum");
  if (x < 0.0)
    throw std::domain_error("lhs_sum: x must be nonnegative");
  double s = 0.0;
  for (int k = K; k >= 1; --k) {
    const double p = std::ldexp(1.0, k);
    s += 1.0 / (p * (1.0 + p * x));
  }
  return s;
}

double p_eval(double y, int K_P) {
  require_terms(K_P, "p_eval");
  // reduce to [-1/2, 1/2] so sin keeps full relative accuracy
  const double r = y - std::nearbyint(y);
  double s = 0.0;
  for (int k = K_P; k >= 1; --k)
    s += std::sin(2.0 * kPi * k * r) * inv_sinh(2.0 * k * kPi * kPi / kLn2);
  return 2.0 * kPi / kLn2 * s;
}

double alternating_partial_sum(double x, int K_alt) {
  double s = 0.0;
  double xk = x;
  for (int k = 2; k <= K_alt; ++k) {
    xk *= x;
    const double p = std::ldexp(1.0, k - 1);
    s += (k % 2 == 0 ? 1.0 : -1.0) * p / (p - 1.0) * xk;
  }
  return s;
}

double alternating_sum(double x, int K_alt) {
  require_terms(K_alt, "alternating_sum");
  std::vector<double> terms;
  double xk = x;
  for (int k = 2; k <= K_alt; ++k) {
    xk *= x;
    if (xk == 0.0)
      break;
    terms.push_back((k % 2 == 0 ? 1.0 : -1.0) * xk / (std::ldexp(1.0, k - 1) - 1.0));
  }
  double s = 0.0;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it)
    s += *it;
  return x * x / (1.0 + x) + s;
}

double rhs_identity(double x, int K_P, int K_alt) {
  if (x < 0.0 || x > 1.0)
    throw std::domain_error("rhs_identity: x outside [0,1]");
  if (x == 0.0)
    return 1.0;
  const double y = std::log2(x);
  return 1.0 + x * y + x * p_eval(y, K_P) + 0.5 * x - alternating_sum(x, K_alt);
}

double g1_via_identity(double x, int K_P, int K_alt) {
  double s = 0.0;
  for (int j = K_alt; j >= 1; --j)
    s += std::pow(-x, j) / (std::ldexp(1.0, j + 1) - 1.0);
  return rhs_identity(x, K_P, K_alt) + s;
}

MellinEvaluation evaluate_identity(double x, int K_lhs, int K_P, int K_alt) {
  if (x < 0.0 || x > 1.0)
    throw std::domain_error("evaluate_identity: x outside [0,1]");
  MellinEvaluation e{};
  e.x = x;
  e.lhs = lhs_sum(x, K_lhs);
  e.rhs = rhs_identity(x, K_P, K_alt);
  e.p_value = x > 0.0 ? p_eval(std::log2(x), K_P) : 0.0;
  e.K_lhs = K_lhs;
  e.K_P = K_P;
  e.K_alt = K_alt;
  // lhs tail <= 2^-K; Fourier tail below the next term; alternating tail
  // below its first omitted term x^{K+1}/(2^K - 1).
  const double fourier_next =
      x * 2.0 * kPi / kLn2 * inv_sinh(2.0 * (K_P + 1) * kPi * kPi / kLn2);
  const double alt_next = std::pow(x, K_alt + 1) / (std::ldexp(1.0, K_alt) - 1.0);
  e.truncation_bound = std::ldexp(1.0, -K_lhs) + fourier_next + alt_next;
  return e;
}

} // namespace bgcd
