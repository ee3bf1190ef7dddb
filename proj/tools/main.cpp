#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fredholm/design.hpp"
#include "fredholm/fem.hpp"
#include "fredholm/kernel.hpp"
#include "fredholm/param_select.hpp"
#include "fredholm/problems.hpp"
#include "fredholm/spectral.hpp"
#include "fredholm/stochastic.hpp"
#include "fredholm/tikhonov.hpp"
#include "output.hpp"

namespace {

using json = nlohmann::json;
using fredholm::cli::Csv;
using fredholm::cli::fmt17;
using namespace fredholm;

struct GlobalOpts {
  std::string out = ".";
  std::uint64_t seed = 0;
  int trials = 0;   // 0 picks the per-command default
  int threads = 0;  // 0 resolves to FREDHOLM_THREADS, then the hardware count
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FREDHOLM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw std::invalid_argument(std::string("FREDHOLM_THREADS must be a positive integer, got '") +
                                  env + "'");
    return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

Problem select_problem(const std::string& truth, const std::string& kernel, int nodes) {
  Problem p = truth == "polynomial" ? polynomial_problem(nodes)
              : truth == "step"     ? step_problem(nodes)
                                    : zero_problem(nodes);
  if (kernel == "exponential") {
    // No closed-form image of the truth under this kernel; observations are
    // synthesized through the discretized operator instead.
    p.kernel = Kernel::exponential(0.0, 1.0);
    p.data = nullptr;
    p.name += "-exponential";
  }
  return p;
}

Eigen::VectorXd clean_data(const Problem& p, const TikhonovSystem& sys,
                           const Eigen::VectorXd& truth_coeffs) {
  const SampleDesign& design = sys.design();
  if (p.data) {
    Eigen::VectorXd y(design.size());
    for (int i = 0; i < design.size(); ++i) y[i] = p.data(design.point(i));
    return y;
  }
  return sys.forward_matrix() * truth_coeffs;
}

double resolve_sigma(const Problem& p, const SampleDesign& design, const Eigen::VectorXd& y,
                     double delta, double sigma_override) {
  if (sigma_override >= 0) return sigma_override;
  if (delta == 0) return 0.0;
  if (p.data) return NoiseModel::relative(delta, p.data, design).sigma;
  return delta * y.cwiseAbs().maxCoeff();
}

const char* stop_reason_name(StopReason r) {
  return r == StopReason::tolerance ? "tolerance" : "max_iter";
}

// Options shared by the solve and select-alpha commands.
struct ProblemOpts {
  std::string kernel = "green";
  std::string truth = "polynomial";
  int n = 1000;
  int nodes = 51;
  double delta = 0.0;
  double sigma = -1.0;  // >= 0 overrides the delta-derived value
  double C = 1.0;
  double tol = 1e-3;
  int max_iter = 15;
  int m = 0;  // 0 takes the kernel's own smoothness index
};

void add_problem_flags(CLI::App* cmd, ProblemOpts& o) {
  cmd->add_option("--kernel", o.kernel, "Kernel (green | exponential)")
      ->check(CLI::IsMember({"green", "exponential"}));
  cmd->add_option("--truth", o.truth, "Ground truth (polynomial | step | zero)")
      ->check(CLI::IsMember({"polynomial", "step", "zero"}));
  cmd->add_option("--n", o.n, "Number of equispaced samples")->check(CLI::Range(2, 10000000));
  cmd->add_option("--nodes", o.nodes, "FEM node count")->check(CLI::Range(2, 100000));
  cmd->add_option("--delta", o.delta, "Relative noise level (sigma = delta * sup|y|)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--sigma", o.sigma, "Absolute noise standard deviation (overrides --delta)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--C", o.C, "Constant in the parameter rules")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", o.tol, "Relative alpha tolerance of the adaptive iteration")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", o.max_iter, "Iteration cap of the adaptive iteration")
      ->check(CLI::Range(1, 100000));
  cmd->add_option("--m", o.m, "Smoothness index override for the parameter rules")
      ->check(CLI::Range(1, 64));
}

// Design, forward system and noisy observations for one run; everything the
// single-instance commands share.
struct Instance {
  Problem problem;
  TikhonovSystem system;
  Eigen::VectorXd truth_coeffs;
  Eigen::VectorXd w;
  double sigma = 0;
  int m = 0;
};

Instance make_instance(const GlobalOpts& g, const ProblemOpts& o) {
  const int threads = resolve_threads(g.threads);
  Problem p = select_problem(o.truth, o.kernel, o.nodes);
  const int m = o.m > 0 ? o.m : p.kernel.smoothness();

  SampleDesign design = make_design(o.n, p.kernel.domain_a(), p.kernel.domain_b());
  TikhonovSystem system(p.kernel, p.space, design, QuadratureRule(), threads);
  Eigen::VectorXd truth_coeffs = interpolate(p.space, p.xdag).coeffs();
  const Eigen::VectorXd y = clean_data(p, system, truth_coeffs);
  const double sigma = resolve_sigma(p, system.design(), y, o.delta, o.sigma);
  Eigen::VectorXd w = y + gen_noise(NoiseModel::gaussian(sigma), o.n, trial_seed(g.seed, 0));

  return Instance{std::move(p), std::move(system), std::move(truth_coeffs), std::move(w), sigma, m};
}

json common_summary(const GlobalOpts& g, const ProblemOpts& o, const Instance& inst) {
  json j;
  j["kernel"] = o.kernel;
  j["truth"] = o.truth;
  j["n"] = o.n;
  j["nodes"] = o.nodes;
  j["sigma"] = inst.sigma;
  j["seed"] = g.seed;
  return j;
}

int run_solve(const GlobalOpts& g, const ProblemOpts& o, const std::string& rule, double alpha_flag,
              bool alpha_given) {
  if (rule == "fixed") {
    if (!alpha_given) throw std::invalid_argument("--alpha-rule fixed requires --alpha");
  } else if (alpha_given) {
    throw std::invalid_argument("--alpha only applies when --alpha-rule is fixed");
  }

  const Instance inst = make_instance(g, o);

  double alpha = alpha_flag;
  json extra = json::object();
  if (rule == "a-priori") {
    PriorRuleInputs in;
    in.sigma = inst.sigma;
    in.n = o.n;
    in.xdag_norm = inst.problem.xdag_norm;
    in.m = inst.m;
    in.C = o.C;
    alpha = a_priori_alpha(in);
  } else if (rule == "adaptive") {
    AdaptiveOptions opt;
    opt.C = o.C;
    opt.tol = o.tol;
    opt.max_iter = o.max_iter;
    const AlphaTrace trace = adaptive_alpha(inst.system, inst.w, inst.m, opt);
    alpha = trace.alpha_final;
    extra["iterations"] = trace.iterations.size();
    extra["converged"] = trace.converged;
    extra["stop_reason"] = stop_reason_name(trace.stop_reason);
  }

  const RegularizedSolution sol = inst.system.solve(inst.w, alpha);

  const FemSpace& space = inst.problem.space;
  const Eigen::VectorXd diff = sol.x.coeffs() - inst.truth_coeffs;
  const double abs_err = l2_norm(FemFunction(space, diff));
  const double truth_norm = l2_norm(FemFunction(space, inst.truth_coeffs));

  Csv table;
  table.header = {"node_t", "coefficient"};
  for (int j = 0; j < space.node_count(); ++j)
    table.add_row({fmt17(space.node(j)), fmt17(sol.x.coeffs()[j])});
  fredholm::cli::write_csv(g.out, "solution.csv", table);

  json j = common_summary(g, o, inst);
  j["alpha_rule"] = rule;
  j["alpha"] = sol.alpha;
  j["discrepancy"] = sol.discrepancy;
  j["solution_norm"] = sol.solution_norm;
  j["objective"] = sol.objective;
  j["l2_error"] = abs_err;
  if (truth_norm > 0) j["rel_l2_error"] = abs_err / truth_norm;
  j.update(extra);
  fredholm::cli::write_json(g.out, "solution.json", j);

  std::cout << "solve: alpha=" << fmt17(sol.alpha) << " discrepancy=" << fmt17(sol.discrepancy)
            << " -> " << g.out << "/solution.{csv,json}\n";
  return 0;
}

int run_select_alpha(const GlobalOpts& g, const ProblemOpts& o, double alpha0) {
  const Instance inst = make_instance(g, o);

  AdaptiveOptions opt;
  opt.C = o.C;
  opt.alpha0 = alpha0;
  opt.tol = o.tol;
  opt.max_iter = o.max_iter;
  const AlphaTrace trace = adaptive_alpha(inst.system, inst.w, inst.m, opt);

  Csv table;
  table.header = {"k", "alpha", "discrepancy", "norm_estimate"};
  for (const AlphaIterate& it : trace.iterations)
    table.add_row({std::to_string(it.k), fmt17(it.alpha), fmt17(it.discrepancy),
                   fmt17(it.norm_estimate)});
  fredholm::cli::write_csv(g.out, "trace.csv", table);

  json j = common_summary(g, o, inst);
  j["alpha0"] = opt.alpha0 > 0 ? opt.alpha0 : default_alpha0(o.n, inst.m);
  j["alpha_final"] = trace.alpha_final;
  j["iterations"] = trace.iterations.size();
  j["converged"] = trace.converged;
  j["stop_reason"] = stop_reason_name(trace.stop_reason);
  if (inst.sigma > 0 || inst.problem.xdag_norm > 0) {
    PriorRuleInputs in;
    in.sigma = inst.sigma;
    in.n = o.n;
    in.xdag_norm = inst.problem.xdag_norm;
    in.m = inst.m;
    in.C = o.C;
    j["alpha_a_priori"] = a_priori_alpha(in);
  }
  fredholm::cli::write_json(g.out, "trace.json", j);

  std::cout << "select-alpha: alpha_final=" << fmt17(trace.alpha_final)
            << " iterations=" << trace.iterations.size() << " stop_reason="
            << stop_reason_name(trace.stop_reason) << " -> " << g.out << "/trace.{csv,json}\n";
  return 0;
}

struct RatesOpts {
  std::string error = "empirical";
  std::string kernel = "green";
  std::string truth = "polynomial";
  int nodes = 51;
  std::vector<int> n_grid;
  std::vector<double> delta_grid;
  std::vector<double> sigma_grid;
  std::string rule = "a-priori";
  double alpha = 0.0;
  double C = 1.0;
  double tol = 1e-3;
  int max_iter = 15;
  int truncation = 64;
};

int run_rates(const GlobalOpts& g, const RatesOpts& o, bool alpha_given) {
  if (o.rule == "fixed") {
    if (!alpha_given) throw std::invalid_argument("--alpha-rule fixed requires --alpha");
  } else if (alpha_given) {
    throw std::invalid_argument("--alpha only applies when --alpha-rule is fixed");
  }
  if (o.error == "wstar" && o.kernel != "green")
    throw std::invalid_argument("--error wstar requires --kernel green");

  McConfig cfg;
  cfg.trials = g.trials > 0 ? g.trials : 500;
  cfg.base_seed = g.seed;
  cfg.n_grid = o.n_grid.empty() ? std::vector<int>{2500, 5000, 10000, 20000} : o.n_grid;
  if (!o.sigma_grid.empty()) {
    cfg.noise_grid = o.sigma_grid;
    cfg.noise_is_relative = false;
  } else {
    cfg.noise_grid = o.delta_grid.empty() ? std::vector<double>{0.005, 0.01, 0.05, 0.1}
                                          : o.delta_grid;
    cfg.noise_is_relative = true;
  }
  cfg.which_error = o.error == "empirical" ? ErrorMetric::empirical
                    : o.error == "wstar"   ? ErrorMetric::wstar
                                           : ErrorMetric::l2;
  cfg.alpha_rule = o.rule == "a-priori" ? AlphaRule::a_priori(o.C)
                   : o.rule == "adaptive"
                       ? AlphaRule::adaptive(o.C, o.tol, o.max_iter)
                       : AlphaRule::fixed(o.alpha);
  cfg.wstar_truncation = o.truncation;

  const Problem problem = select_problem(o.truth, o.kernel, o.nodes);
  const RateResult r = mc_error_expectation(cfg, problem, resolve_threads(g.threads));

  Csv table;
  table.header = {"n", "sigma", "eta", "mean_sq_error", "normalized"};
  for (const RatePoint& pt : r.points)
    table.add_row({std::to_string(pt.n), fmt17(pt.sigma), fmt17(pt.eta), fmt17(pt.mean_sq_error),
                   fmt17(pt.normalized)});
  fredholm::cli::write_csv(g.out, "rates.csv", table);

  json j;
  j["error_metric"] = o.error;
  j["kernel"] = o.kernel;
  j["truth"] = o.truth;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.base_seed;
  j["points"] = r.points.size();
  j["normalization_exponent"] = r.normalization_exponent;
  j["fit_valid"] = r.fit_valid;
  if (r.fit_valid) {
    j["slope"] = r.slope;
    j["intercept"] = r.intercept;
  } else {
    j["fit_skipped"] = "insufficient-points";
  }
  if (r.theory_slope) j["theory_slope"] = *r.theory_slope;
  fredholm::cli::write_json(g.out, "rates.json", j);

  std::cout << "rates: points=" << r.points.size();
  if (r.fit_valid) std::cout << " slope=" << fmt17(r.slope);
  std::cout << " -> " << g.out << "/rates.{csv,json}\n";
  return 0;
}

struct TailsOpts {
  std::string kernel = "green";
  std::string truth = "polynomial";
  int n = 10000;
  int nodes = 51;
  double delta = 0.01;
  double alpha = 0.0;  // 0 resolves to the a priori value
  double C = 1.0;
  int m = 0;
};

int run_tails(const GlobalOpts& g, const TailsOpts& o) {
  const int threads = resolve_threads(g.threads);
  const int trials = g.trials > 0 ? g.trials : 2000;
  const Problem problem = select_problem(o.truth, o.kernel, o.nodes);
  const int m = o.m > 0 ? o.m : problem.kernel.smoothness();

  double alpha = o.alpha;
  if (alpha <= 0) {
    // Resolve sigma the same way tail_experiment will, then apply the rule.
    const SampleDesign design = make_design(o.n, problem.space.a(), problem.space.b());
    double sigma = 0.0;
    if (problem.data) {
      sigma = NoiseModel::relative(o.delta, problem.data, design).sigma;
    } else {
      const TikhonovSystem system(problem.kernel, problem.space, design, QuadratureRule(), threads);
      const Eigen::VectorXd y = system.forward_matrix() * interpolate(problem.space, problem.xdag).coeffs();
      sigma = o.delta * y.cwiseAbs().maxCoeff();
    }
    PriorRuleInputs in;
    in.sigma = sigma;
    in.n = o.n;
    in.xdag_norm = problem.xdag_norm;
    in.m = m;
    in.C = o.C;
    alpha = a_priori_alpha(in);
  }

  const TailResult r = tail_experiment(problem, o.n, o.delta, alpha, trials, g.seed, threads);

  Csv errors;
  errors.header = {"trial", "error"};
  for (int t = 0; t < r.errors.size(); ++t)
    errors.add_row({std::to_string(t), fmt17(r.errors[t])});
  fredholm::cli::write_csv(g.out, "tails.csv", errors);

  Csv qq;
  qq.header = {"normal_quantile", "standardized_error"};
  for (const auto& pt : r.qq_points) qq.add_row({fmt17(pt[0]), fmt17(pt[1])});
  fredholm::cli::write_csv(g.out, "qq.csv", qq);

  const double mean = r.errors.mean();
  double var = 0.0;
  for (int t = 0; t < r.errors.size(); ++t) {
    const double d = r.errors[t] - mean;
    var += d * d;
  }
  var /= std::max<Eigen::Index>(1, r.errors.size() - 1);

  json j;
  j["kernel"] = o.kernel;
  j["truth"] = o.truth;
  j["n"] = o.n;
  j["delta"] = o.delta;
  j["trials"] = trials;
  j["seed"] = g.seed;
  j["alpha"] = r.alpha;
  j["sigma"] = r.sigma;
  j["mean"] = mean;
  j["stdev"] = std::sqrt(var);
  j["qq_correlation"] = r.qq_correlation;
  j["degenerate"] = r.degenerate;
  json hist = json::array();
  for (const TailResult::Bin& b : r.histogram)
    hist.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  j["histogram"] = hist;
  fredholm::cli::write_json(g.out, "tails.json", j);

  std::cout << "tails: trials=" << trials << " qq_correlation=" << fmt17(r.qq_correlation)
            << " -> " << g.out << "/{tails,qq}.csv\n";
  return 0;
}

struct SingvalsOpts {
  std::string kernel = "green";
  int N = 400;
  int j0 = 6;
  int j1 = 0;  // 0 resolves to min(400, N/2)
};

int run_singvals(const GlobalOpts& g, const SingvalsOpts& o) {
  const int j1 = o.j1 > 0 ? o.j1 : std::min(400, o.N / 2);
  if (o.j0 >= j1) throw std::invalid_argument("--j0 must be smaller than --j1");
  if (j1 > o.N) throw std::invalid_argument("--j1 cannot exceed --N");

  const Kernel kernel = o.kernel == "green" ? Kernel::green() : Kernel::exponential(0.0, 1.0);
  const Eigen::MatrixXd A = quadrature_operator_matrix(kernel, o.N);
  const Eigen::VectorXd values = spectrum(A);
  const DecayFit fit = fit_decay(values, o.j0, j1);

  Csv table;
  table.header = {"j", "s_j"};
  for (int j = 0; j < values.size(); ++j)
    table.add_row({std::to_string(j + 1), fmt17(values[j])});
  fredholm::cli::write_csv(g.out, "singvals.csv", table);

  json j;
  j["kernel"] = o.kernel;
  j["N"] = o.N;
  j["j0"] = fit.j0;
  j["j1"] = fit.j1;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["residual_rms"] = fit.residual_rms;
  fredholm::cli::write_json(g.out, "singvals.json", j);

  std::cout << "singvals: N=" << o.N << " slope=" << fmt17(fit.slope) << " -> " << g.out
            << "/singvals.{csv,json}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tikhonov-regularized solution of first-kind Fredholm equations from point samples"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI file (sections per subcommand)");

  GlobalOpts g;
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Base seed for noise generation")->capture_default_str();
  app.add_option("--trials", g.trials, "Monte Carlo trials (0 = command default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--threads", g.threads,
                 "Worker threads (0 = FREDHOLM_THREADS env or hardware count)")
      ->check(CLI::NonNegativeNumber);

  ProblemOpts solve_o;
  std::string solve_rule = "a-priori";
  double solve_alpha = 0.0;
  CLI::App* solve = app.add_subcommand("solve", "Solve one regularized instance");
  solve->fallthrough();
  add_problem_flags(solve, solve_o);
  solve->add_option("--alpha-rule", solve_rule, "Parameter rule (a-priori | adaptive | fixed)")
      ->check(CLI::IsMember({"a-priori", "adaptive", "fixed"}));
  CLI::Option* solve_alpha_opt =
      solve->add_option("--alpha", solve_alpha, "Regularization parameter for --alpha-rule fixed")
          ->check(CLI::PositiveNumber);

  ProblemOpts select_o;
  double select_alpha0 = 0.0;
  CLI::App* select = app.add_subcommand("select-alpha", "Run the adaptive parameter iteration");
  select->fallthrough();
  add_problem_flags(select, select_o);
  select->add_option("--alpha0", select_alpha0, "Initial alpha (0 = n^{-2m/(2m+1)})")
      ->check(CLI::PositiveNumber);

  RatesOpts rates_o;
  CLI::App* rates = app.add_subcommand("rates", "Monte Carlo convergence-rate experiment");
  rates->fallthrough();
  rates->add_option("--error", rates_o.error, "Error metric (empirical | wstar | l2)")
      ->check(CLI::IsMember({"empirical", "wstar", "l2"}));
  rates->add_option("--kernel", rates_o.kernel, "Kernel (green | exponential)")
      ->check(CLI::IsMember({"green", "exponential"}));
  rates->add_option("--truth", rates_o.truth, "Ground truth (polynomial | step | zero)")
      ->check(CLI::IsMember({"polynomial", "step", "zero"}));
  rates->add_option("--nodes", rates_o.nodes, "FEM node count")->check(CLI::Range(2, 100000));
  rates->add_option("--n-grid", rates_o.n_grid, "Sample counts")
      ->check(CLI::Range(2, 10000000));
  CLI::Option* delta_grid_opt =
      rates->add_option("--delta-grid", rates_o.delta_grid, "Relative noise levels")
          ->check(CLI::NonNegativeNumber);
  rates->add_option("--sigma-grid", rates_o.sigma_grid, "Absolute noise levels")
      ->check(CLI::NonNegativeNumber)
      ->excludes(delta_grid_opt);
  rates->add_option("--alpha-rule", rates_o.rule, "Parameter rule (a-priori | adaptive | fixed)")
      ->check(CLI::IsMember({"a-priori", "adaptive", "fixed"}));
  CLI::Option* rates_alpha_opt =
      rates->add_option("--alpha", rates_o.alpha, "Regularization parameter for --alpha-rule fixed")
          ->check(CLI::PositiveNumber);
  rates->add_option("--C", rates_o.C, "Constant in the parameter rules")
      ->check(CLI::PositiveNumber);
  rates->add_option("--tol", rates_o.tol, "Adaptive-rule tolerance")->check(CLI::PositiveNumber);
  rates->add_option("--max-iter", rates_o.max_iter, "Adaptive-rule iteration cap")
      ->check(CLI::Range(1, 100000));
  rates->add_option("--truncation", rates_o.truncation, "Dual-norm truncation index")
      ->check(CLI::Range(1, 100000));

  TailsOpts tails_o;
  CLI::App* tails = app.add_subcommand("tails", "Error distribution at a fixed alpha");
  tails->fallthrough();
  tails->add_option("--kernel", tails_o.kernel, "Kernel (green | exponential)")
      ->check(CLI::IsMember({"green", "exponential"}));
  tails->add_option("--truth", tails_o.truth, "Ground truth (polynomial | step | zero)")
      ->check(CLI::IsMember({"polynomial", "step", "zero"}));
  tails->add_option("--n", tails_o.n, "Number of equispaced samples")
      ->check(CLI::Range(2, 10000000));
  tails->add_option("--nodes", tails_o.nodes, "FEM node count")->check(CLI::Range(2, 100000));
  tails->add_option("--delta", tails_o.delta, "Relative noise level")
      ->check(CLI::NonNegativeNumber);
  tails->add_option("--alpha", tails_o.alpha, "Regularization parameter (0 = a priori value)")
      ->check(CLI::NonNegativeNumber);
  tails->add_option("--C", tails_o.C, "Constant in the a priori rule")
      ->check(CLI::PositiveNumber);
  tails->add_option("--m", tails_o.m, "Smoothness index override")->check(CLI::Range(1, 64));

  SingvalsOpts sing_o;
  CLI::App* singvals = app.add_subcommand("singvals", "Spectrum of the collocation matrix");
  singvals->fallthrough();
  singvals->add_option("--kernel", sing_o.kernel, "Kernel (green | exponential)")
      ->check(CLI::IsMember({"green", "exponential"}));
  singvals->add_option("--N", sing_o.N, "Midpoint collocation size")->check(CLI::Range(2, 20000));
  singvals->add_option("--j0", sing_o.j0, "Decay-fit window start (1-based)")
      ->check(CLI::Range(1, 20000));
  singvals->add_option("--j1", sing_o.j1, "Decay-fit window end (0 = min(400, N/2))")
      ->check(CLI::Range(1, 20000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) return run_solve(g, solve_o, solve_rule, solve_alpha, solve_alpha_opt->count() > 0);
    if (*select) return run_select_alpha(g, select_o, select_alpha0);
    if (*rates) return run_rates(g, rates_o, rates_alpha_opt->count() > 0);
    if (*tails) return run_tails(g, tails_o);
    if (*singvals) return run_singvals(g, sing_o);
  } catch (const TrialFailure& e) {
    std::cerr << "error: trial " << e.trial() << " (seed " << e.seed() << "): " << e.what()
              << '\n';
    return 3;
  } catch (const AdaptiveSolveError& e) {
    std::cerr << "error: " << e.what() << " after " << e.partial_trace().iterations.size()
              << " completed iterations\n";
    return 3;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
