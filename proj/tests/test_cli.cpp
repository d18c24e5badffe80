#include <doctest.h>

#include <stdexcept>

#include "bgcd/cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace bgcd;
namespace fs = std::filesystem;

namespace {

struct Captured {
  int code;
  std::string out;
  std::string err;
};

Captured run(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"bgcdlab"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage)
    argv.push_back(s.c_str());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bgcdlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

} // namespace

TEST_CASE("iterate with defaults converges and writes its outputs") {
  const auto dir = scratch("iterate");
  const auto r = run({"iterate", "--output-dir", dir.string()});
  CHECK(r.code == kExitOk);
  const auto h = load_json(dir / "history.json");
  CHECK(h["converged"] == true);
  CHECK(h["grid_size"] == 4097);
  CHECK(h["K"] == 60);
  CHECK(std::abs(h["b"].get<double>() - 2.83297657) < 1e-4);
  CHECK(h["sup_deltas"].size() == h["iterations"].get<std::size_t>());
  CHECK(fs::exists(dir / "g_inf.csv"));
  CHECK(fs::exists(dir / "iterates" / "g_000.csv"));
}

TEST_CASE("iterate that runs out of iterations exits 2") {
  const auto dir = scratch("maxiter");
  const auto r = run({"iterate", "--max-iter", "1", "--grid-size", "257", "--output-dir", dir.string()});
  CHECK(r.code == kExitNoConvergence);
  CHECK(load_json(dir / "history.json")["converged"] == false);
}

TEST_CASE("usage errors exit 64") {
  CHECK(run({"iterate", "--grid-size", "2"}).code == kExitUsage);
  CHECK(run({"iterate", "--no-such-flag"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"spectrum", "--grid-size", "32"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"iterate", "--help"}).code == kExitOk);
}

TEST_CASE("constant from a CSV of 1 - x") {
  const auto dir = scratch("constant");
  {
    std::ofstream f(dir / "g0.csv");
    f << std::setprecision(17) << "x,value\n";
    for (int i = 0; i <= 1024; ++i)
      f << i / 1024.0 << ',' << 1.0 - i / 1024.0 << '\n';
  }
  const auto r = run({"constant", "--input", (dir / "g0.csv").string(), "--output-dir", dir.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("b = ") != std::string::npos);
  CHECK(load_json(dir / "constant.json")["b"].get<double>() ==
        doctest::Approx(2.0 + 1.0 / std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("malformed CSV exits 1 and names the line") {
  const auto dir = scratch("badcsv");
  {
    std::ofstream f(dir / "bad.csv");
    f << "x,value\n0,1\n0.5,oops\n1,0\n";
  }
  const auto r = run({"constant", "--input", (dir / "bad.csv").string(), "--output-dir", dir.string()});
  CHECK(r.code == kExitIo);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(run({"constant", "--input", (dir / "missing.csv").string(), "--output-dir", dir.string()}).code ==
        kExitIo);
}

TEST_CASE("mellin writes one row per point") {
  const auto dir = scratch("mellin");
  REQUIRE(run({"mellin", "--points", "1000", "--output-dir", dir.string()}).code == kExitOk);
  std::ifstream in(dir / "mellin.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,lhs,rhs,residual,p_value");
  int rows = 0;
  double worst = 0.0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<double> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');)
      cells.push_back(std::stod(cell));
    REQUIRE(cells.size() == 5);
    worst = std::max(worst, std::abs(cells[3]));
  }
  CHECK(rows == 1000);
  CHECK(worst < 1e-9);
}

TEST_CASE("simulate output is identical across runs and thread counts") {
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  REQUIRE(run({"simulate", "--pairs", "20000", "--chains", "20000", "--seed", "7", "--threads", "1",
               "--output-dir", a.string()})
              .code == kExitOk);
  REQUIRE(run({"simulate", "--pairs", "20000", "--chains", "20000", "--seed", "7", "--threads", "3",
               "--output-dir", b.string()})
              .code == kExitOk);
  for (const char* f : {"integers.json", "integer_tails.csv", "model.json", "model_tails.csv"}) {
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    CHECK(!slurp(a / f).empty());
  }
  const auto ints = load_json(a / "integers.json");
  CHECK(ints["n_pairs"] == 20000);
}

TEST_CASE("spectrum writes its report and optional matrix") {
  const auto dir = scratch("spectrum");
  REQUIRE(run({"spectrum", "--grid-size", "256", "--dump-matrix", "--output-dir", dir.string()}).code ==
          kExitOk);
  const auto j = load_json(dir / "spectrum.json");
  CHECK(j["n"] == 256);
  CHECK(std::abs(j["lambda1"].get<double>() - 1.0) < 5e-3);
  CHECK(fs::exists(dir / "b2_matrix.csv"));
}

TEST_CASE("verify passes") {
  const auto r = run({"verify"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
