#include "bgcd/cli.hpp"

#include "bgcd/csv.hpp"
#include "bgcd/fixpoint.hpp"
#include "bgcd/gcdsim.hpp"
#include "bgcd/mellin.hpp"
#include "bgcd/spectral.hpp"
#include "bgcd/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace bgcd {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out)
    throw IoError("write failed: " + path.string());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json history_json(const IterationHistory& h, const std::optional<BrentConstant>& b) {
  json j;
  j["iterations"] = h.iterations();
  j["sup_deltas"] = h.sup_deltas;
  j["l1_derivative_deltas"] = h.l1_derivative_deltas;
  j["b"] = b ? json(b->b) : json(nullptr);
  j["b_grid"] = b ? json(b->quadrature_grid) : json(nullptr);
  j["converged"] = h.converged_at.has_value();
  j["converged_at"] = h.converged_at ? json(*h.converged_at) : json(nullptr);
  j["contraction_ratio_estimate"] = optional_number(contraction_ratio_estimate(h));
  j["grid_size"] = h.final_iterate().size();
  j["K"] = h.K;
  j["tol"] = h.tol;
  return j;
}

json tail_json(const EmpiricalTail& t) {
  return {{"after_cycles", t.after_cycles},
          {"n_samples", t.n_samples},
          {"thresholds", t.thresholds},
          {"survival", t.survival}};
}

void write_tails_csv(const fs::path& path, const std::vector<EmpiricalTail>& tails) {
  auto out = open_out(path);
  out << "n,x,value\n";
  for (const auto& t : tails)
    for (std::size_t i = 0; i < t.thresholds.size(); ++i)
      out << t.after_cycles << ',' << format_double(t.thresholds[i]) << ','
          << format_double(t.survival[i]) << '\n';
}

// Reference tails g_0..g_n on the default iteration grid.
std::vector<TailFunction> reference_tails(int n, const RunConfig& c) {
  std::vector<TailFunction> g{initial_tail(c.grid_size)};
  const TruncationPolicy policy(c.truncation_k);
  for (int i = 0; i < n; ++i)
    g.push_back(apply_F(g.back(), policy));
  return g;
}

std::string iterate_name(std::size_t n) {
  std::ostringstream os;
  os << "g_" << std::setw(3) << std::setfill('0') << n << ".csv";
  return os.str();
}

} // namespace

int cmd_iterate(const RunConfig& c) {
  ensure_dir(c.output_dir);
  IterationHistory h;
  bool converged = true;
  try {
    h = iterate_to_fixpoint(c.grid_size, TruncationPolicy(c.truncation_k), c.tol, c.max_iter);
  } catch (const ConvergenceError& e) {
    h = e.history();
    converged = false;
  }
  const fs::path iter_dir = c.output_dir / "iterates";
  ensure_dir(iter_dir);
  for (std::size_t n = 0; n < h.iterates.size(); ++n)
    write_grid_csv(iter_dir / iterate_name(n), h.iterates[n].function());
  write_grid_csv(c.output_dir / "g_inf.csv", h.final_iterate().function());

  std::optional<BrentConstant> b;
  if (converged)
    b = compute_b(h.final_iterate());
  write_json(c.output_dir / "history.json", history_json(h, b));

  std::cout << (converged ? "converged" : "not converged") << " after " << h.iterations()
            << " iterations, last sup delta " << std::setprecision(3) << h.sup_deltas.back()
            << '\n';
  if (b)
    std::cout << "b = " << std::setprecision(9) << b->b << '\n';
  return converged ? kExitOk : kExitNoConvergence;
}

int cmd_constant(const RunConfig& c) {
  ensure_dir(c.output_dir);
  std::string source;
  std::optional<TailFunction> g;
  if (!c.input.empty()) {
    try {
      g.emplace(read_grid_csv(c.input), kIteratedTolerance);
    } catch (const CsvError& e) {
      throw IoError(c.input.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw IoError(c.input.string() + ": " + e.what());
    }
    source = c.input.string();
  } else {
    try {
      g.emplace(iterate_to_fixpoint(c.grid_size, TruncationPolicy(c.truncation_k), c.tol,
                                    c.max_iter)
                    .final_iterate());
    } catch (const ConvergenceError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitNoConvergence;
    }
    source = "iteration";
  }
  const BrentConstant b = compute_b(*g);
  write_json(c.output_dir / "constant.json", {{"b", b.b},
                                              {"quadrature_grid", b.quadrature_grid},
                                              {"endpoint_limit", b.endpoint_limit},
                                              {"source", source}});
  std::cout << "b = " << std::setprecision(9) << b.b << '\n';
  return kExitOk;
}

int cmd_simulate(const RunConfig& c) {
  ensure_dir(c.output_dir);
  const auto refs = reference_tails(c.steps, c);
  if (c.n_pairs > 0) {
    const auto r = simulate_integers(c.n_pairs, c.bit_size, c.seed, c.threads, c.steps);
    json j;
    j["n_pairs"] = r.n_pairs;
    j["bit_size"] = r.bit_size;
    j["seed"] = r.seed;
    j["mean_cycles"] = r.mean_cycles;
    j["mean_log_uv"] = r.mean_log_uv;
    j["b_implied"] = r.b_implied;
    j["mean_log2_uv"] = r.mean_log2_uv;
    j["b_implied_log2"] = r.b_implied_log2;
    j["cycle_ratio"] = r.cycle_ratio();
    j["cycle_ratio_log2"] = r.cycle_ratio_log2();
    j["max_subtraction_excess"] = r.max_subtraction_excess;
    std::vector<EmpiricalTail> tails;
    json tj = json::array();
    for (int n = 1; n <= c.steps; ++n) {
      tails.push_back(r.tail(n));
      json t = tail_json(tails.back());
      t["sup_distance_to_g_n"] = ks_distance(r.samples[static_cast<std::size_t>(n - 1)],
                                             refs[static_cast<std::size_t>(n)].function());
      tj.push_back(std::move(t));
    }
    j["tails"] = std::move(tj);
    write_json(c.output_dir / "integers.json", j);
    write_tails_csv(c.output_dir / "integer_tails.csv", tails);
    std::cout << std::setprecision(6) << "pairs " << r.n_pairs << ", mean cycles "
              << r.mean_cycles << ", b_implied (ln) " << r.b_implied << ", b_implied (log2) "
              << r.b_implied_log2 << '\n';
  }
  if (c.n_chains > 0) {
    const auto sim = simulate_model(c.n_chains, c.steps, c.seed, c.threads);
    json j;
    j["n_chains"] = sim.n_chains;
    j["n_steps"] = sim.n_steps;
    j["seed"] = sim.seed;
    std::vector<EmpiricalTail> tails;
    json tj = json::array();
    double worst = 0.0;
    for (int n = 0; n <= c.steps; ++n) {
      tails.push_back(sim.tail(n));
      json t = tail_json(tails.back());
      const double ks = ks_distance(sim.samples[static_cast<std::size_t>(n)],
                                    refs[static_cast<std::size_t>(n)].function());
      worst = std::max(worst, ks);
      t["ks_distance_to_g_n"] = ks;
      tj.push_back(std::move(t));
    }
    j["tails"] = std::move(tj);
    j["max_ks_distance"] = worst;
    j["ks_bound"] = 5.0 / std::sqrt(static_cast<double>(sim.n_chains));
    write_json(c.output_dir / "model.json", j);
    write_tails_csv(c.output_dir / "model_tails.csv", tails);
    std::cout << std::setprecision(6) << "chains " << sim.n_chains << ", max KS distance "
              << worst << " (bound " << 5.0 / std::sqrt(static_cast<double>(sim.n_chains))
              << ")\n";
  }
  return kExitOk;
}

int cmd_spectrum(const RunConfig& c) {
  ensure_dir(c.output_dir);
  const std::size_t n = c.grid_size_set ? c.grid_size : kSpectralGrid;
  if (n < 64) {
    std::cerr << "error: spectrum needs --grid-size >= 64\n";
    return kExitUsage;
  }
  const auto op = discretize_B2(n, TruncationPolicy(c.truncation_k));
  const auto lead = leading_eigen(op);
  const auto est = subdominant_modulus(op, lead);
  write_json(c.output_dir / "spectrum.json", {{"n", est.grid},
                                              {"K", est.K},
                                              {"lambda1", est.lambda1},
                                              {"lambda2_modulus", est.lambda2_modulus},
                                              {"residual1", est.residual1},
                                              {"iterations", est.iterations},
                                              {"window_spread", est.window_spread},
                                              {"collocation_degree", est.collocation_degree},
                                              {"hat_lambda2_modulus", est.hat_lambda2_modulus},
                                              {"hat_window_spread", est.hat_window_spread}});
  if (c.dump_matrix) {
    auto out = open_out(c.output_dir / "b2_matrix.csv");
    write_matrix_csv(out, op);
  }
  std::cout << std::setprecision(6) << "lambda1 " << est.lambda1 << ", |lambda2| "
            << est.lambda2_modulus << '\n';
  return kExitOk;
}

int cmd_mellin(const RunConfig& c) {
  ensure_dir(c.output_dir);
  auto out = open_out(c.output_dir / "mellin.csv");
  out << "x,lhs,rhs,residual,p_value\n";
  double worst = 0.0;
  for (std::size_t i = 1; i <= c.points; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(c.points);
    const auto e = evaluate_identity(x);
    worst = std::max(worst, std::abs(e.residual()));
    out << format_double(x) << ',' << format_double(e.lhs) << ',' << format_double(e.rhs) << ','
        << format_double(e.residual()) << ',' << format_double(e.p_value) << '\n';
  }
  std::cout << "max residual " << std::setprecision(3) << worst << '\n';
  return kExitOk;
}

int cmd_verify(const RunConfig& c) {
  VerifyOptions o;
  o.grid_size = c.grid_size;
  o.K = c.truncation_k;
  o.seed = c.seed;
  o.threads = c.threads;
  const auto results = run_verification(o);
  int failed = 0;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(10) << r.suite << ' '
              << std::setw(44) << r.name << ' ' << r.detail << '\n';
    failed += r.passed ? 0 : 1;
  }
  std::cout << results.size() - static_cast<std::size_t>(failed) << '/' << results.size()
            << " passed\n";
  if (failed > 0) {
    std::cout << "failed:\n";
    for (const auto& r : results)
      if (!r.passed)
        std::cout << "  " << r.suite << ": " << r.name << '\n';
  }
  return failed == 0 ? kExitOk : kExitVerifyFailed;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Numerical lab for the binary gcd model", "bgcdlab"};
  app.require_subcommand(1);
  RunConfig c;
  std::uint64_t seed = c.seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--grid-size", c.grid_size, "grid nodes (>= 3)")->check(CLI::Range(3ul, 1ul << 24));
    sub->add_option("--truncation-k", c.truncation_k, "series terms K")->check(CLI::Range(1, 62));
    sub->add_option("--threads", c.threads, "worker threads (0: all cores)");
    sub->add_option("--output-dir", c.output_dir, "directory for outputs");
  };
  auto add_iteration = [&](CLI::App* sub) {
    sub->add_option("--tol", c.tol, "sup-norm convergence tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", c.max_iter, "iteration limit")->check(CLI::Range(1, 1000000));
  };

  auto* iterate = app.add_subcommand("iterate", "iterate F from 1-x to the fixed point");
  add_common(iterate);
  add_iteration(iterate);
  auto* constant = app.add_subcommand("constant", "compute b from a tail function");
  add_common(constant);
  add_iteration(constant);
  constant->add_option("--input", c.input, "tail CSV (x,value); iterates when absent");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo: integer gcd runs and the model chain");
  add_common(simulate);
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--pairs", c.n_pairs, "integer pairs (0 skips)");
  simulate->add_option("--chains", c.n_chains, "model chains (0 skips)");
  simulate->add_option("--bits", c.bit_size, "bit size of the pairs")->check(CLI::Range(16, 64));
  simulate->add_option("--steps", c.steps, "cycles/steps to tabulate")->check(CLI::Range(1, 64));
  auto* spectrum = app.add_subcommand("spectrum", "leading and subdominant eigenvalues of B_2");
  add_common(spectrum);
  spectrum->add_flag("--dump-matrix", c.dump_matrix, "write b2_matrix.csv");
  auto* mellin = app.add_subcommand("mellin", "check the Mellin identity on a grid");
  add_common(mellin);
  mellin->add_option("--points", c.points, "x = i/points, i = 1..points")->check(CLI::Range(1ul, 100000000ul));
  auto* verify = app.add_subcommand("verify", "run every property suite");
  add_common(verify);
  verify->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  c.seed = seed;
  auto* chosen = app.get_subcommands().front();
  c.subcommand = chosen->get_name();
  c.grid_size_set = chosen->count("--grid-size") > 0;

  try {
    if (c.subcommand == "iterate")
      return cmd_iterate(c);
    if (c.subcommand == "constant")
      return cmd_constant(c);
    if (c.subcommand == "simulate")
      return cmd_simulate(c);
    if (c.subcommand == "spectrum")
      return cmd_spectrum(c);
    if (c.subcommand == "mellin")
      return cmd_mellin(c);
    return cmd_verify(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

} // namespace bgcd
