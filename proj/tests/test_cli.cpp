#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fredholm/param_select.hpp"
#include "fredholm/stochastic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path scratch_root() {
  static const fs::path root = [] {
    fs::path p = fs::current_path() / "cli_scratch";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = scratch_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliRun run_cli(const std::string& args, const std::string& env_prefix = "") {
  const fs::path dir = scratch_root();
  const fs::path out = dir / "last_stdout.txt";
  const fs::path err = dir / "last_stderr.txt";
  const std::string cmd = env_prefix + FREDHOLM_CLI_PATH + " " + args + " >" + out.string() +
                          " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

json read_json(const fs::path& file) { return json::parse(slurp(file)); }

std::vector<std::vector<std::string>> read_csv(const fs::path& file) {
  std::ifstream in(file);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// every numeric cell is printed with enough digits that parsing it back and
// reprinting it reproduces the text exactly
void check_roundtrip(const fs::path& csv_file, std::size_t col) {
  const auto rows = read_csv(csv_file);
  REQUIRE(rows.size() > 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::string& cell = rows[i][col];
    const double parsed = std::strtod(cell.c_str(), nullptr);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", parsed);
    CHECK(cell == buf);
  }
}

}  // namespace

TEST_CASE("usage and argument errors") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(contains(run_cli("--help").out, "solve"));

  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);

  SUBCASE("rejected values never leave files behind") {
    const fs::path dir = fresh_dir("badalpha");
    const CliRun r =
        run_cli("solve --alpha-rule fixed --alpha -1 --out " + dir.string());
    CHECK(r.exit_code == 2);
    CHECK_FALSE(fs::exists(dir / "solution.json"));
    CHECK_FALSE(fs::exists(dir / "solution.csv"));
  }

  SUBCASE("alpha and rule must agree") {
    const fs::path dir = fresh_dir("rulemix");
    CliRun r = run_cli("solve --alpha 1e-6 --n 100 --out " + dir.string());
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "--alpha only applies"));

    r = run_cli("solve --alpha-rule fixed --n 100 --out " + dir.string());
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "requires --alpha"));
  }

  SUBCASE("metric and kernel compatibility") {
    const CliRun r = run_cli("rates --error wstar --kernel exponential --trials 5");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "wstar"));
  }

  SUBCASE("the two noise grids are mutually exclusive") {
    CHECK(run_cli("rates --delta-grid 0.01 --sigma-grid 0.001 --trials 5").exit_code == 2);
  }

  SUBCASE("bad fit windows") {
    CHECK(run_cli("singvals --N 100 --j0 50 --j1 20").exit_code == 2);
    CHECK(run_cli("singvals --N 100 --j0 6 --j1 500").exit_code == 2);
  }

  SUBCASE("bad thread environment") {
    const CliRun r = run_cli("solve --n 100", "FREDHOLM_THREADS=abc ");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "FREDHOLM_THREADS"));
  }
}

TEST_CASE("singular value export") {
  const fs::path dir = fresh_dir("singvals");
  const CliRun r = run_cli("singvals --N 400 --j0 6 --j1 100 --out " + dir.string());
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.out, "singvals: N=400 slope="));

  const json j = read_json(dir / "singvals.json");
  CHECK(j["kernel"] == "green");
  CHECK(j["N"] == 400);
  CHECK(j["j0"] == 6);
  CHECK(j["j1"] == 100);
  CHECK(std::abs(j["slope"].get<double>() + 2.0) < 0.05);
  CHECK(j["residual_rms"].get<double>() >= 0.0);

  const auto rows = read_csv(dir / "singvals.csv");
  REQUIRE(rows.size() == 401);
  CHECK(rows[0] == std::vector<std::string>{"j", "s_j"});
  CHECK(rows[1][0] == "1");
  CHECK(rows[400][0] == "400");
  const double s1 = std::strtod(rows[1][1].c_str(), nullptr);
  CHECK(s1 == doctest::Approx(0.101321).epsilon(1e-3));
  // values are sorted and positive down the whole spectrum
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double v = std::strtod(rows[i][1].c_str(), nullptr);
    CHECK(std::abs(v) <= prev);
    prev = std::abs(v);
  }
  check_roundtrip(dir / "singvals.csv", 1);

  SUBCASE("window end defaults to min(400, N/2)") {
    const fs::path d2 = fresh_dir("singvals_default");
    REQUIRE(run_cli("singvals --N 400 --out " + d2.string()).exit_code == 0);
    CHECK(read_json(d2 / "singvals.json")["j1"] == 200);
  }
}

TEST_CASE("adaptive solve of the benchmark instance") {
  const fs::path dir = fresh_dir("case_a");
  const CliRun r = run_cli(
      "solve --truth polynomial --n 9000 --delta 0.001 --alpha-rule adaptive --seed 42 --out " +
      dir.string());
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.out, "solve: alpha="));

  const json j = read_json(dir / "solution.json");
  CHECK(j["alpha_rule"] == "adaptive");
  CHECK(j["truth"] == "polynomial");
  CHECK(j["kernel"] == "green");
  CHECK(j["n"] == 9000);
  CHECK(j["nodes"] == 51);
  CHECK(j["seed"] == 42);
  CHECK(j["converged"] == true);
  CHECK(j["stop_reason"] == "tolerance");
  CHECK(j["iterations"] == 5);

  CHECK(j["sigma"].get<double>() == doctest::Approx(8.393004372268426e-6).epsilon(1e-9));

  const double alpha = j["alpha"].get<double>();
  CHECK(alpha > 1.11e-10 / 3.0);
  CHECK(alpha < 1.11e-10 * 3.0);

  const double disc = j["discrepancy"].get<double>();
  CHECK(disc == doctest::Approx(8.24e-6).epsilon(0.10));

  const double rel = j["rel_l2_error"].get<double>();
  CHECK(rel > 0.0256);
  CHECK(rel < 0.0768);

  const auto rows = read_csv(dir / "solution.csv");
  REQUIRE(rows.size() == 52);
  CHECK(rows[0] == std::vector<std::string>{"node_t", "coefficient"});
  CHECK(std::strtod(rows[1][0].c_str(), nullptr) == 0.0);
  CHECK(std::strtod(rows[51][0].c_str(), nullptr) == 1.0);
  check_roundtrip(dir / "solution.csv", 1);
}

TEST_CASE("fixed-alpha solve of the zero instance") {
  const fs::path dir = fresh_dir("zero");
  const CliRun r = run_cli(
      "solve --truth zero --n 200 --alpha-rule fixed --alpha 1e-6 --out " + dir.string());
  REQUIRE(r.exit_code == 0);

  const auto rows = read_csv(dir / "solution.csv");
  REQUIRE(rows.size() == 52);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(std::strtod(rows[i][1].c_str(), nullptr) == 0.0);

  const json j = read_json(dir / "solution.json");
  CHECK(j["l2_error"].get<double>() == 0.0);
  CHECK(j["solution_norm"].get<double>() == 0.0);
  CHECK_FALSE(j.contains("rel_l2_error"));
}

TEST_CASE("parameter-selection traces") {
  SUBCASE("loose tolerance accepts the first update") {
    const fs::path dir = fresh_dir("trace_loose");
    const CliRun r = run_cli(
        "select-alpha --truth polynomial --n 500 --delta 0.01 --tol 1e9 --seed 4 --out " +
        dir.string());
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "stop_reason=tolerance"));
    const json j = read_json(dir / "trace.json");
    CHECK(j["iterations"] == 1);
    CHECK(j["converged"] == true);
    CHECK(j["stop_reason"] == "tolerance");
    CHECK(j["alpha0"].get<double>() ==
          doctest::Approx(fredholm::default_alpha0(500, 2)).epsilon(1e-15));
    CHECK(j.contains("alpha_a_priori"));
    CHECK(read_csv(dir / "trace.csv").size() == 2);
  }

  SUBCASE("iteration cap reports non-convergence") {
    const fs::path dir = fresh_dir("trace_cap");
    const CliRun r = run_cli(
        "select-alpha --truth polynomial --n 500 --delta 0.01 --tol 1e-12 --max-iter 1 "
        "--seed 4 --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    const json j = read_json(dir / "trace.json");
    CHECK(j["iterations"] == 1);
    CHECK(j["converged"] == false);
    CHECK(j["stop_reason"] == "max_iter");
    CHECK(read_csv(dir / "trace.csv").size() == 2);
  }

  SUBCASE("the benchmark trace is monotone and lands at the known alpha") {
    const fs::path dir = fresh_dir("trace_bench");
    const CliRun r = run_cli(
        "select-alpha --truth polynomial --n 9000 --delta 0.001 --seed 42 --out " + dir.string());
    REQUIRE(r.exit_code == 0);

    const json j = read_json(dir / "trace.json");
    CHECK(j["iterations"] == 5);
    CHECK(j["converged"] == true);
    CHECK(j["alpha_final"].get<double>() ==
          doctest::Approx(1.1372247334203014e-10).epsilon(1e-6));
    CHECK(j["alpha_a_priori"].get<double>() ==
          doctest::Approx(1.1501913017869324e-10).epsilon(1e-9));

    const auto rows = read_csv(dir / "trace.csv");
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"k", "alpha", "discrepancy", "norm_estimate"});
    CHECK(std::strtod(rows[1][1].c_str(), nullptr) ==
          doctest::Approx(fredholm::default_alpha0(9000, 2)).epsilon(1e-15));
    for (int k = 2; k <= 5; ++k) {
      const double a_prev = std::strtod(rows[k - 1][1].c_str(), nullptr);
      const double a_here = std::strtod(rows[k][1].c_str(), nullptr);
      CHECK(a_here < a_prev);
    }
    CHECK(std::strtod(rows[5][2].c_str(), nullptr) ==
          doctest::Approx(8.3545298248489532e-6).epsilon(1e-6));
  }
}

TEST_CASE("rate experiment export") {
  SUBCASE("small grid with pinned seed") {
    const fs::path dir = fresh_dir("rates_small");
    const CliRun r = run_cli(
        "rates --n-grid 100 --n-grid 200 --n-grid 400 --delta-grid 0.01 --delta-grid 0.1 "
        "--trials 50 --seed 3 --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "rates: points=6 slope="));

    const json j = read_json(dir / "rates.json");
    CHECK(j["error_metric"] == "empirical");
    CHECK(j["trials"] == 50);
    CHECK(j["points"] == 6);
    CHECK(j["fit_valid"] == true);
    CHECK(j["normalization_exponent"].get<double>() == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(j["theory_slope"].get<double>() == doctest::Approx(1.6).epsilon(1e-15));
    CHECK(j["slope"].get<double>() == doctest::Approx(1.655988973624514).epsilon(1e-6));

    const auto rows = read_csv(dir / "rates.csv");
    REQUIRE(rows.size() == 7);
    CHECK(rows[0] ==
          std::vector<std::string>{"n", "sigma", "eta", "mean_sq_error", "normalized"});
    // sorted by eta: the quietest point pairs the largest n with the lowest level
    CHECK(rows[1][0] == "400");
    double prev_eta = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double eta = std::strtod(rows[i][2].c_str(), nullptr);
      CHECK(eta >= prev_eta);
      prev_eta = eta;
    }
    check_roundtrip(dir / "rates.csv", 3);
  }

  SUBCASE("a single grid point cannot support a fit") {
    const fs::path dir = fresh_dir("rates_single");
    const CliRun r = run_cli(
        "rates --n-grid 500 --delta-grid 0.01 --trials 10 --seed 2 --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    const json j = read_json(dir / "rates.json");
    CHECK(j["fit_valid"] == false);
    CHECK_FALSE(j.contains("slope"));
    CHECK(j["fit_skipped"] == "insufficient-points");
    CHECK(j["points"] == 1);
  }

  SUBCASE("a failing trial aborts with its replay coordinates") {
    const CliRun r = run_cli("rates --alpha-rule fixed --alpha 1e-300 --n-grid 4 --trials 5");
    CHECK(r.exit_code == 3);
    CHECK(contains(r.err, "error: trial 0"));
    CHECK(contains(r.err, "seed"));
  }
}

TEST_CASE("rate gates at the default grids") {
  SUBCASE("empirical prediction error") {
    const fs::path dir = fresh_dir("rates_empirical");
    const CliRun r = run_cli("rates --seed 1905 --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    const json j = read_json(dir / "rates.json");
    CHECK(j["trials"] == 500);
    CHECK(j["points"] == 16);
    REQUIRE(j["fit_valid"] == true);
    CHECK(std::abs(j["slope"].get<double>() - 1.6) <= 0.2);
  }

  SUBCASE("dual-norm reconstruction error") {
    const fs::path dir = fresh_dir("rates_wstar");
    const CliRun r = run_cli("rates --error wstar --seed 1905 --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    const json j = read_json(dir / "rates.json");
    CHECK(j["theory_slope"].get<double>() == doctest::Approx(0.8).epsilon(1e-15));
    REQUIRE(j["fit_valid"] == true);
    CHECK(std::abs(j["slope"].get<double>() - 0.8) <= 0.15);
  }
}

TEST_CASE("tail experiment export") {
  const fs::path dir = fresh_dir("tails");
  const CliRun r = run_cli("tails --n 2000 --trials 200 --seed 5 --out " + dir.string());
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.out, "tails: trials=200 qq_correlation="));

  const json j = read_json(dir / "tails.json");
  CHECK(j["n"] == 2000);
  CHECK(j["trials"] == 200);
  CHECK(j["degenerate"] == false);
  CHECK(j["alpha"].get<double>() == doctest::Approx(1.525216410105989e-08).epsilon(1e-9));
  const double qq = j["qq_correlation"].get<double>();
  CHECK(qq == doctest::Approx(0.99671451087777574).epsilon(1e-6));
  CHECK(qq >= 0.99);
  CHECK(j["mean"].get<double>() > 0.0);
  CHECK(j["stdev"].get<double>() > 0.0);
  long total = 0;
  for (const json& bin : j["histogram"]) total += bin["count"].get<long>();
  CHECK(total == 200);

  const auto errors = read_csv(dir / "tails.csv");
  REQUIRE(errors.size() == 201);
  CHECK(errors[0] == std::vector<std::string>{"trial", "error"});
  CHECK(errors[1][0] == "0");

  const auto qqcsv = read_csv(dir / "qq.csv");
  REQUIRE(qqcsv.size() == 201);
  CHECK(qqcsv[0] == std::vector<std::string>{"normal_quantile", "standardized_error"});
  for (int i : {0, 57, 199}) {
    const double q = std::strtod(qqcsv[i + 1][0].c_str(), nullptr);
    CHECK(q == fredholm::std_normal_quantile((i + 0.5) / 200.0));
  }
  check_roundtrip(dir / "qq.csv", 0);
  check_roundtrip(dir / "qq.csv", 1);
}

TEST_CASE("runs are bitwise reproducible") {
  const std::string args = "tails --n 500 --trials 120 --seed 9";
  const fs::path a = fresh_dir("repro_a");
  const fs::path b = fresh_dir("repro_b");
  const fs::path c = fresh_dir("repro_c");
  const fs::path d = fresh_dir("repro_d");

  REQUIRE(run_cli(args + " --threads 1 --out " + a.string()).exit_code == 0);
  REQUIRE(run_cli(args + " --threads 3 --out " + b.string()).exit_code == 0);
  REQUIRE(run_cli(args + " --out " + c.string(), "FREDHOLM_THREADS=2 ").exit_code == 0);
  REQUIRE(run_cli(args + " --threads 1 --out " + d.string()).exit_code == 0);

  for (const char* name : {"tails.csv", "qq.csv", "tails.json"}) {
    const std::string ref = slurp(a / name);
    CHECK(slurp(b / name) == ref);
    CHECK(slurp(c / name) == ref);
    CHECK(slurp(d / name) == ref);
  }

  // different seeds must not collide
  const fs::path e = fresh_dir("repro_e");
  REQUIRE(run_cli("tails --n 500 --trials 120 --seed 10 --threads 1 --out " + e.string())
              .exit_code == 0);
  CHECK(slurp(e / "tails.csv") != slurp(a / "tails.csv"));
}

TEST_CASE("options can come from a config file") {
  const fs::path flag_dir = fresh_dir("config_flags");
  const fs::path cfg_dir = fresh_dir("config_file");

  REQUIRE(run_cli("solve --truth polynomial --n 400 --delta 0.01 --alpha-rule fixed "
                  "--alpha 1e-7 --seed 4 --out " + flag_dir.string())
              .exit_code == 0);

  const fs::path ini = scratch_root() / "run.ini";
  {
    std::ofstream out(ini);
    out << "out = " << cfg_dir.string() << "\n"
        << "seed = 4\n"
        << "[solve]\n"
        << "truth = polynomial\n"
        << "n = 400\n"
        << "delta = 0.01\n"
        << "alpha-rule = fixed\n"
        << "alpha = 1e-7\n";
  }
  REQUIRE(run_cli("--config " + ini.string() + " solve").exit_code == 0);

  CHECK(slurp(cfg_dir / "solution.json") == slurp(flag_dir / "solution.json"));
  CHECK(slurp(cfg_dir / "solution.csv") == slurp(flag_dir / "solution.csv"));
}
