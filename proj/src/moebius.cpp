#include "bgcd/moebius.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bgcd {

namespace {

double pow2(int k) { return std::ldexp(1.0, k); }

void require_k(int k) {
  if (k < 1 || k > 62)
    throw std::invalid_argument("Moebius index k must lie in [1, 62], got " + std::to_string(k));
}

} // namespace

MoebiusMap::MoebiusMap(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
  if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d)))
    throw std::invalid_argument("MoebiusMap: non-finite coefficient");
  if (a < 0.0 || b < 0.0)
    throw std::invalid_argument("MoebiusMap: a and b must be nonnegative");
  if (c < 0.0 || !(d > 0.0))
    throw std::invalid_argument("MoebiusMap: need c >= 0 and d > 0");
  if (determinant() == 0.0)
    throw std::invalid_argument("MoebiusMap: ad - bc must be nonzero");
}

double MoebiusMap::sup_norm() const noexcept {
  return std::max(b_ / d_, (a_ + b_) / (c_ + d_));
}

MoebiusMap identity_map() { return MoebiusMap(1.0, 0.0, 0.0, 1.0); }

double moebius_apply(const MoebiusMap& m, double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("moebius_apply: x outside [0,1]");
  return m(x);
}

MoebiusMap moebius_compose(const MoebiusMap& m1, const MoebiusMap& m2) {
  double a = m1.a() * m2.a() + m1.b() * m2.c();
  double b = m1.a() * m2.b() + m1.b() * m2.d();
  double c = m1.c() * m2.a() + m1.d() * m2.c();
  double d = m1.c() * m2.b() + m1.d() * m2.d();
  const double big = std::max({a, b, c, d});
  if (big > 0.0) {
    int e = 0;
    std::frexp(big, &e);
    const int shift = 1 - e;
    a = std::ldexp(a, shift);
    b = std::ldexp(b, shift);
    c = std::ldexp(c, shift);
    d = std::ldexp(d, shift);
  }
  return MoebiusMap(a, b, c, d);
}

MoebiusMap mu(int k) {
  require_k(k);
  return MoebiusMap(1.0, 0.0, 1.0, pow2(k));
}

MoebiusMap nu(int k) {
  require_k(k);
  return MoebiusMap(0.0, 1.0, pow2(k), 1.0);
}

MoebiusSeries::MoebiusSeries(std::vector<MoebiusTerm> terms) {
  terms_.reserve(terms.size());
  for (const auto& t : terms)
    add(t.eps, t.map);
}

void MoebiusSeries::add(int eps, const MoebiusMap& m) {
  if (eps != 1 && eps != -1)
    throw std::invalid_argument("MoebiusSeries: eps must be +1 or -1");
  if (eps * m.sign() >= 0)
    throw std::invalid_argument("MoebiusSeries: term violates eps * sign(m) < 0");
  terms_.push_back({eps, m});
}

double MoebiusSeries::operator()(double x) const noexcept {
  double s = 0.0;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it)
    s += it->eps * it->map(x);
  return s;
}

std::pair<double, double> s_condition_partial_sums(const MoebiusSeries& s) {
  double norms = 0.0;
  double dets = 0.0;
  for (const auto& t : s.terms()) {
    norms += t.map.sup_norm();
    dets += std::abs(t.map.determinant()) / (t.map.c() * t.map.d());
  }
  return {norms, dets};
}

double g1_series(double x, int K) {
  if (K < 1 || K > 62)
    throw std::invalid_argument("g1_series: K must lie in [1, 62]");
  double s = 0.0;
  for (int k = K; k >= 1; --k) {
    const double p = pow2(k);
    s += (1.0 / (1.0 + p * x) - x / (x + p)) / p;
  }
  return s;
}

MoebiusSeries g1_moebius_series(int K) {
  require_k(K);
  MoebiusSeries s;
  for (int k = 1; k <= K; ++k) {
    const double p = pow2(k);
    s.add(+1, MoebiusMap(0.0, 1.0 / p, p, 1.0));
    s.add(-1, MoebiusMap(1.0 / p, 0.0, 1.0, p));
  }
  return s;
}

} // namespace bgcd
