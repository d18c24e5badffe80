#include "bgcd/verify.hpp"

#include "bgcd/fixpoint.hpp"
#include "bgcd/gcdsim.hpp"
#include "bgcd/mellin.hpp"
#include "bgcd/moebius.hpp"
#include "bgcd/operators.hpp"
#include "bgcd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <functional>
#include <numeric>
#include <sstream>

namespace bgcd {

TailFunction random_tail(CounterRng& rng, std::size_t n_nodes) {
  const int parts = 1 + static_cast<int>(rng.next() % 3);
  std::vector<double> weight(static_cast<std::size_t>(parts)), power(weight.size()), pole(weight.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    weight[i] = rng.uniform();
    power[i] = 1.0 + 4.0 * rng.uniform();
    pole[i] = 9.0 * rng.uniform();
    total += weight[i];
  }
  return TailFunction(GridFunction::sample(n_nodes, [&](double x) {
    if (x == 1.0)
      return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) {
      const double p = 0.5 * (std::pow(1.0 - x, power[i]) + (1.0 - x) / (1.0 + pole[i] * x));
      s += weight[i] * p;
    }
    return s / total;
  }), kIteratedTolerance);
}

DensityFunction random_density(CounterRng& rng, std::size_t n) {
  const double p1 = -0.3 + 3.3 * rng.uniform();
  const double p2 = 3.0 * rng.uniform();
  const double centre = rng.uniform();
  const double width = 0.05 + 0.3 * rng.uniform();
  double a = rng.uniform(), b = rng.uniform(), c = rng.uniform(), d = rng.uniform();
  const double mass = 0.05 + 0.95 * rng.uniform();
  // integrals of the pieces, bump integral approximated by its Gaussian mass
  const double bump_mass = width * std::sqrt(std::numbers::pi);
  const double total = a / (p1 + 1.0) + b / (p2 + 1.0) + c * bump_mass + d;
  const double scale = mass / total;
  a *= scale;
  b *= scale;
  c *= scale;
  d *= scale;
  return sample_density(n, [&](double x) {
    const double z = (x - centre) / width;
    return a * std::pow(x, p1) + b * std::pow(x, p2) + c * std::exp(-z * z) + d;
  });
}

namespace {

class Report {
public:
  explicit Report(std::vector<CheckResult>& out) : out_(out) {}

  void check(const std::string& suite, const std::string& name, bool ok, double value,
             const std::string& bound) {
    std::ostringstream os;
    os << std::setprecision(6) << value << ' ' << bound;
    out_.push_back({suite, name, ok, os.str()});
  }

  // Runs body and records a failure instead of propagating an exception.
  void guard(const std::string& suite, const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      out_.push_back({suite, name, false, std::string("exception: ") + e.what()});
    }
  }

private:
  std::vector<CheckResult>& out_;
};

GridFunction combine(double alpha, const GridFunction& f, double beta, const GridFunction& g) {
  std::vector<double> ys(f.size());
  for (std::size_t i = 0; i < ys.size(); ++i)
    ys[i] = alpha * f.ys()[i] + beta * g.ys()[i];
  return f.with_values(std::move(ys));
}

MoebiusMap random_map(CounterRng& rng) {
  for (;;) {
    const double a = rng.uniform() * 4.0, b = rng.uniform() * 4.0;
    const double c = 0.1 + rng.uniform() * 4.0, d = 0.1 + rng.uniform() * 4.0;
    if (std::abs(a * d - b * c) > 1e-3)
      return MoebiusMap(a, b, c, d);
  }
}

void funcspace_suite(Report& r, const IterationHistory& hist, const VerifyOptions& o) {
  const std::string s = "funcspace";
  double worst_holder = 0.0;
  double worst_mass = 0.0;
  bool shapes = true;
  for (std::size_t n = 1; n < hist.iterates.size(); ++n) {
    const auto& g = hist.iterates[n];
    worst_holder = std::max(worst_holder, holder_seminorm(g.function()));
    shapes = shapes && check_tail_shape(g.function(), kIteratedTolerance).member &&
             check_k2(g.function(), kIteratedTolerance).member;
    worst_mass = std::max(worst_mass, std::abs(integral(discrete_derivative(g)) - 1.0));
  }
  r.check(s, "iterates are tails in K2", shapes, 0.0, "");
  r.check(s, "Holder seminorm N_1/2 <= 5", worst_holder <= 5.0 + 1e-6, worst_holder, "<= 5");
  r.check(s, "derivative mass within 2e-3 of 1", worst_mass <= 2e-3, worst_mass, "<= 2e-3");

  CounterRng rng = CounterRng::for_stream(o.seed, 1);
  double worst_sym = 0.0, worst_tri = -1.0;
  for (int i = 0; i < o.instances / 4; ++i) {
    const auto f = random_tail(rng, 513), g = random_tail(rng, 513), h = random_tail(rng, 513);
    worst_sym = std::max(worst_sym, std::abs(sup_distance(f, g) - sup_distance(g, f)));
    worst_tri = std::max(worst_tri, sup_distance(f, h) - sup_distance(f, g) - sup_distance(g, h));
    const auto a = random_density(rng, 512), b = random_density(rng, 512), c = random_density(rng, 512);
    worst_sym = std::max(worst_sym, std::abs(l1_distance(a, b) - l1_distance(b, a)));
    worst_tri = std::max(worst_tri, l1_distance(a, c) - l1_distance(a, b) - l1_distance(b, c));
  }
  r.check(s, "metric symmetry", worst_sym == 0.0, worst_sym, "== 0");
  r.check(s, "triangle inequality", worst_tri <= 1e-12, worst_tri, "<= 1e-12");
}

void moebius_suite(Report& r, const VerifyOptions& o) {
  const std::string s = "moebius";
  CounterRng rng = CounterRng::for_stream(o.seed, 2);
  bool signs = true, shape = true;
  double hom = 0.0;
  for (int i = 0; i < o.instances; ++i) {
    const auto m1 = random_map(rng), m2 = random_map(rng);
    const auto m = moebius_compose(m1, m2);
    signs = signs && m.sign() == m1.sign() * m2.sign();
    for (int j = 0; j < 10; ++j) {
      const double x = rng.uniform();
      hom = std::max(hom, std::abs(m(x) - m1(m2(x))));
    }
    if (m1.sign() < 0) {
      for (int j = 0; j < 256; ++j) {
        const double x0 = j / 258.0, x1 = (j + 1) / 258.0, x2 = (j + 2) / 258.0;
        shape = shape && m1(x1) < m1(x0) && m1(x2) - 2.0 * m1(x1) + m1(x0) > 0.0;
      }
    }
  }
  bool range = true;
  for (int k = 1; k <= 62; ++k)
    for (double x : {0.0, 0.25, 0.5, 1.0})
      range = range && mu(k)(x) >= 0.0 && mu(k)(x) <= 1.0 && nu(k)(x) >= 0.0 && nu(k)(x) <= 1.0;
  r.check(s, "sign multiplicativity", signs, 0.0, "");
  r.check(s, "action homomorphism", hom <= 1e-13, hom, "<= 1e-13");
  r.check(s, "sign -1 maps decrease and are convex", shape, 0.0, "");
  r.check(s, "mu_k, nu_k map [0,1] into [0,1]", range, 0.0, "");
}

void operators_suite(Report& r, const IterationHistory& hist, const VerifyOptions& o) {
  const std::string s = "operators";
  const TruncationPolicy policy(o.K);
  CounterRng rng = CounterRng::for_stream(o.seed, 3);
  const std::size_t n = o.grid_size;
  double lin_f = 0.0, lin_b = 0.0, mass = 0.0, contraction = -1.0, norm_ratio = 0.0;
  for (int i = 0; i < o.instances; ++i) {
    const double alpha = 2.0 * rng.uniform() - 1.0, beta = 2.0 * rng.uniform() - 1.0;
    if (i < o.instances / 4) {
      const auto f = random_tail(rng, n), g = random_tail(rng, n);
      const auto lhs = apply_F_series(combine(alpha, f.function(), beta, g.function()), policy);
      const auto rhs = combine(alpha, apply_F_series(f.function(), policy), beta,
                               apply_F_series(g.function(), policy));
      lin_f = std::max(lin_f, sup_distance(lhs, rhs));
      norm_ratio = std::max(norm_ratio, operator_norm_bound_check(f, g, policy));
    }
    const auto h1 = random_density(rng, n - 1), h2 = random_density(rng, n - 1);
    const auto [after, before] = contraction_check(h1, h2, policy);
    contraction = std::max(contraction, after - before);
    mass = std::max(mass, std::abs(integral(apply_B2(h1, policy)) - integral(h1)));
    std::vector<double> mix(h1.size());
    for (std::size_t j = 0; j < mix.size(); ++j)
      mix[j] = alpha * h1.ys()[j] + beta * h2.ys()[j];
    const auto b1 = apply_B2_values(h1, policy), b2 = apply_B2_values(h2, policy);
    const auto bm = apply_B2_values(h1.xs(), mix, policy);
    for (std::size_t j = 0; j < mix.size(); ++j)
      lin_b = std::max(lin_b, std::abs(bm[j] - (alpha * b1[j] + beta * b2[j])));
  }
  r.check(s, "F linearity", lin_f <= 1e-12, lin_f, "<= 1e-12");
  r.check(s, "B2 linearity", lin_b <= 1e-12, lin_b, "<= 1e-12");
  r.check(s, "||F||_inf ratio <= 2", norm_ratio <= 2.0, norm_ratio, "<= 2");
  r.check(s, "B2 integral preservation", mass <= 2e-3, mass, "<= 2e-3");
  r.check(s, "B2 L1 contraction", contraction <= 1e-9, contraction, "excess <= 1e-9");

  bool closure = true;
  for (const auto& g : hist.iterates) {
    const auto next = apply_F(g, policy);
    closure = closure && check_k1_surface(next.function()).member &&
              check_k2(next.function(), kIteratedTolerance).member;
  }
  r.check(s, "K1 surface and K2 closed under F", closure, 0.0, "");

  double trunc = 0.0;
  const auto& g = hist.iterates.at(1);
  for (int K : {10, 20, 40}) {
    const double d = sup_distance(apply_F_series(g.function(), TruncationPolicy(K)),
                                  apply_F_series(g.function(), TruncationPolicy(K + 5)));
    trunc = std::max(trunc, d / std::ldexp(1.0, -K));
  }
  r.check(s, "truncation K vs K+5 within 2^-K", trunc <= 1.0, trunc, "(relative) <= 1");
}

void fixpoint_suite(Report& r, const IterationHistory& hist, const VerifyOptions& o) {
  const std::string s = "fixpoint";
  const auto u = derivative_error_sequence(hist);
  double rise = 0.0;
  for (std::size_t i = 1; i < u.size(); ++i)
    rise = std::max(rise, u[i] - u[i - 1]);
  r.check(s, "u_n nonincreasing", rise <= 1e-6, rise, "rise <= 1e-6");
  const double move = sup_distance(apply_F(hist.final_iterate(), TruncationPolicy(o.K)),
                                   hist.final_iterate());
  r.check(s, "fixed point stable under F", move < 2.0 * hist.tol, move, "< 2 tol");
  double margin = std::numeric_limits<double>::infinity();
  for (double m : hist.k2_margins)
    margin = std::min(margin, m);
  r.check(s, "sandwich bound on every iterate", margin >= -kIteratedTolerance, margin, ">= -1e-6");
}

void mellin_suite(Report& r) {
  const std::string s = "mellin";
  double residual = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double x = 0.01 + 0.99 * i / 1000.0;
    residual = std::max(residual, std::abs(evaluate_identity(x).residual()));
  }
  r.check(s, "identity residual on (0.01,1]", residual < 1e-9, residual, "< 1e-9");
  double period = 0.0, odd = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double y = -2.0 + i / 50.0;
    period = std::max(period, std::abs(p_eval(y) - p_eval(y + 1.0)));
    odd = std::max(odd, std::abs(p_eval(-y) + p_eval(y)));
  }
  r.check(s, "P periodic", period <= 1e-15, period, "<= 1e-15");
  r.check(s, "P odd", odd <= 1e-15, odd, "<= 1e-15");
  bool bracket = true;
  for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double limit = alternating_sum(x);
    for (int K = 2; K < 40; K += 2) {
      const double even = alternating_partial_sum(x, K);
      const double odd_sum = alternating_partial_sum(x, K + 1);
      bracket = bracket && std::min(even, odd_sum) <= limit + 1e-15 &&
                limit <= std::max(even, odd_sum) + 1e-15;
    }
  }
  r.check(s, "alternating partial sums bracket the limit", bracket, 0.0, "");
}

void gcdsim_suite(Report& r, const VerifyOptions& o) {
  const std::string s = "gcdsim";
  bool symmetric = true, doubling = true, trace = true;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const auto [u, v] = draw_odd_pair(o.seed, i, 40);
    const auto a = binary_gcd(u, v), b = binary_gcd(v, u);
    symmetric = symmetric && a.gcd == b.gcd && a.cycles == b.cycles;
    const auto d = binary_gcd(2 * u, 2 * v);
    doubling = doubling && d.gcd == 2 * a.gcd && d.cycles == a.cycles;
    if (a.gcd == 1) {
      for (double t : a.ratio_trace)
        trace = trace && t > 0.0 && t <= 1.0;
      trace = trace && (a.ratio_trace.empty() || a.ratio_trace.back() == 1.0);
    }
  }
  r.check(s, "gcd symmetric in (u,v)", symmetric, 0.0, "");
  r.check(s, "doubling scales gcd, keeps cycles", doubling, 0.0, "");
  r.check(s, "coprime traces in (0,1], end at 1", trace, 0.0, "");

  const std::size_t N = 100000;
  const auto sim = simulate_model(N, 4, o.seed, o.threads);
  TailFunction g = initial_tail(kDefaultGridSize);
  double ks = 0.0;
  for (int n = 0; n <= 4; ++n) {
    ks = std::max(ks, ks_distance(sim.samples[static_cast<std::size_t>(n)], g.function()));
    g = apply_F(g, TruncationPolicy(o.K));
  }
  const double bound = 5.0 / std::sqrt(static_cast<double>(N));
  r.check(s, "model chain matches F^n(g_0) in KS", ks < bound, ks, "< 5/sqrt(N)");
}

void spectral_suite(Report& r, const DensityFunction& limit, const VerifyOptions& o) {
  const std::string s = "spectral";
  const TruncationPolicy policy(o.K);
  std::vector<double> lambdas;
  for (std::size_t n : {512u, 1024u, 2048u}) {
    const auto op = discretize_B2(n, policy);
    const auto lead = leading_eigen(op);
    lambdas.push_back(lead.lambda1);
    if (n == kSpectralGrid) {
      r.check(s, "entries nonnegative", op.entries.minCoeff() >= -1e-12, op.entries.minCoeff(), ">= -1e-12");
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
      const double drift = std::abs(op.quad_weights.dot(op.entries * ones) - op.quad_weights.dot(ones));
      r.check(s, "discrete integral preserved", drift <= 2e-3, drift, "<= 2e-3");
      r.check(s, "residual1 < 1e-8", lead.residual1 < 1e-8, lead.residual1, "< 1e-8");
      const auto eig = lead.density(op);
      std::vector<double> sub(n);
      for (std::size_t i = 0; i < n; ++i)
        sub[i] = limit.interpolate(op.nodes[i]);
      const double dist = l1_distance(eig, DensityFunction(op.nodes, sub));
      r.check(s, "eigenvector matches -g'_inf", dist < 0.01, dist, "< 0.01");
    }
  }
  const double d1 = std::abs(lambdas[1] - lambdas[0]), d2 = std::abs(lambdas[2] - lambdas[1]);
  r.check(s, "lambda1 converges with n", d2 < d1, d2, std::string("< ") + std::to_string(d1));

  double worst_gap = 0.0;
  for (int m : {7, 8, 9, 10}) {
    const auto op = discretize_B2(kSpectralGrid, policy);
    const auto est = subdominant_modulus(op, leading_eigen(op), m);
    worst_gap = std::max(worst_gap, est.lambda2_modulus / est.lambda1);
  }
  r.check(s, "spectral gap |l2|/l1 < 0.25 (conjecture)", worst_gap < 0.25, worst_gap, "< 0.25");
}

} // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& o) {
  std::vector<CheckResult> out;
  Report r(out);
  std::optional<IterationHistory> hist;
  r.guard("fixpoint", "iteration converges", [&] {
    hist = iterate_to_fixpoint(o.grid_size, TruncationPolicy(o.K), 1e-10, 200);
    r.check("fixpoint", "iteration converges", true, static_cast<double>(*hist->converged_at),
            "iterations");
  });
  if (hist) {
    r.guard("funcspace", "suite", [&] { funcspace_suite(r, *hist, o); });
    r.guard("operators", "suite", [&] { operators_suite(r, *hist, o); });
    r.guard("fixpoint", "suite", [&] { fixpoint_suite(r, *hist, o); });
    r.guard("spectral", "suite", [&] { spectral_suite(r, extract_limit_density(*hist), o); });
  }
  r.guard("moebius", "suite", [&] { moebius_suite(r, o); });
  r.guard("mellin", "suite", [&] { mellin_suite(r); });
  r.guard("gcdsim", "suite", [&] { gcdsim_suite(r, o); });
  return out;
}

} // namespace bgcd
