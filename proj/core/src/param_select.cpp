#include "fredholm/param_select.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace fredholm {

namespace {

void check_smoothness(int m) {
  if (m < 1) throw std::invalid_argument("param_select: smoothness index must be >= 1");
}

// Exponent 4m/(2m+1) of the a priori rule, formed as a rational expression.
double rule_exponent(int m) { return 4.0 * m / (2.0 * m + 1.0); }

}  // namespace

double a_priori_alpha(const PriorRuleInputs& in) {
  check_smoothness(in.m);
  if (in.n < 1) throw std::invalid_argument("a_priori_alpha: sample count must be >= 1");
  if (!(in.C > 0) || !std::isfinite(in.C))
    throw std::invalid_argument("a_priori_alpha: constant C must be positive");
  if (in.sigma < 0 || !std::isfinite(in.sigma))
    throw std::invalid_argument("a_priori_alpha: sigma must be non-negative");
  if (in.xdag_norm < 0 || !std::isfinite(in.xdag_norm))
    throw std::invalid_argument("a_priori_alpha: xdag_norm must be non-negative");
  if (in.sigma == 0 && in.xdag_norm == 0)
    throw std::invalid_argument("a_priori_alpha: sigma and xdag_norm cannot both be zero");

  const double eta = in.sigma / std::sqrt(static_cast<double>(in.n));
  const double ratio = in.C * eta / (in.xdag_norm + eta);
  return std::pow(ratio, rule_exponent(in.m));
}

double default_alpha0(long long n, int m) {
  check_smoothness(m);
  if (n < 1) throw std::invalid_argument("default_alpha0: sample count must be >= 1");
  const double exponent = -2.0 * m / (2.0 * m + 1.0);
  return std::pow(static_cast<double>(n), exponent);
}

AdaptiveSolveError::AdaptiveSolveError(const std::string& what, AlphaTrace partial)
    : std::runtime_error(what), partial_(std::move(partial)) {}

AlphaTrace adaptive_alpha(const TikhonovSystem& system, const Eigen::VectorXd& w, int m,
                          const AdaptiveOptions& opt) {
  check_smoothness(m);
  if (!(opt.C > 0) || !std::isfinite(opt.C))
    throw std::invalid_argument("adaptive_alpha: constant C must be positive");
  if (!(opt.tol > 0)) throw std::invalid_argument("adaptive_alpha: tolerance must be positive");
  if (opt.max_iter < 1) throw std::invalid_argument("adaptive_alpha: max_iter must be >= 1");

  const long long n = system.design().size();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  double alpha = opt.alpha0 > 0 ? opt.alpha0 : default_alpha0(n, m);
  if (!std::isfinite(alpha))
    throw std::invalid_argument("adaptive_alpha: initial alpha must be finite");
  // The update solves alpha^{(2m+1)/(4m)} = C n^{-1/2} d / N, i.e. alpha is
  // the same power of the self-consistent ratio as in the a priori rule.
  const double exponent = 4.0 * m / (2.0 * m + 1.0);

  AlphaTrace trace;
  for (int k = 0; k < opt.max_iter; ++k) {
    double d = 0.0, norm_estimate = 0.0;
    try {
      const RegularizedSolution sol = system.solve(w, alpha);
      d = sol.discrepancy;
      norm_estimate = sol.solution_norm + inv_sqrt_n * d;
    } catch (const std::runtime_error& e) {
      throw AdaptiveSolveError(std::string("adaptive_alpha: solve failed at iterate ") +
                                   std::to_string(k) + ": " + e.what(),
                               std::move(trace));
    }
    if (!std::isfinite(d) || !std::isfinite(norm_estimate))
      throw AdaptiveSolveError(std::string("adaptive_alpha: non-finite iterate at k = ") +
                                   std::to_string(k),
                               std::move(trace));
    trace.iterations.push_back({k, alpha, d, norm_estimate});

    if (d == 0.0) {
      // Perfect fit: the update would drive alpha to zero, which leaves the
      // functional's minimizer unchanged; report the current alpha.
      trace.alpha_final = alpha;
      trace.converged = true;
      trace.stop_reason = StopReason::tolerance;
      return trace;
    }

    const double ratio = opt.C * inv_sqrt_n * d / norm_estimate;
    const double next = std::pow(ratio, exponent);
    if (!std::isfinite(next) || next <= 0.0)
      throw AdaptiveSolveError(std::string("adaptive_alpha: degenerate update at k = ") +
                                   std::to_string(k),
                               std::move(trace));

    if (std::abs(alpha - next) / next < opt.tol) {
      trace.alpha_final = next;
      trace.converged = true;
      trace.stop_reason = StopReason::tolerance;
      return trace;
    }
    alpha = next;
  }

  trace.alpha_final = alpha;
  trace.converged = false;
  trace.stop_reason = StopReason::max_iter;
  return trace;
}

AlphaTrace adaptive_alpha(const Kernel& kernel, const FemSpace& space, const Observation& obs,
                          int m, double C, double alpha0, double tol, int max_iter) {
  TikhonovSystem system(kernel, space, obs.design());
  AdaptiveOptions opt;
  opt.C = C;
  opt.alpha0 = alpha0;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return adaptive_alpha(system, obs.w(), m, opt);
}

}  // namespace fredholm
