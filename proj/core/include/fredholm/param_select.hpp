#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fredholm/tikhonov.hpp"

namespace fredholm {

struct PriorRuleInputs {
  double sigma = 0;      // noise standard deviation, >= 0
  long long n = 1;       // sample count, >= 1
  double xdag_norm = 0;  // L2 norm of the truth (or an estimate), >= 0
  int m = 2;             // kernel smoothness index, >= 1
  double C = 1.0;        // hidden-constant multiplier, > 0
};

/// A priori choice alpha = (C eta / (xdag_norm + eta))^{4m/(2m+1)} with
/// eta = sigma n^{-1/2}. Requires sigma or xdag_norm positive.
double a_priori_alpha(const PriorRuleInputs& in);

/// Default initial guess n^{-2m/(2m+1)} for the adaptive iteration.
double default_alpha0(long long n, int m);

enum class StopReason { tolerance, max_iter };

struct AlphaIterate {
  int k = 0;
  double alpha = 0;          // alpha^(k) used for this solve
  double discrepancy = 0;    // d^(k) = |K x^(k) - w|_n
  double norm_estimate = 0;  // N^(k) = ||x^(k)|| + n^{-1/2} d^(k)
};

struct AlphaTrace {
  std::vector<AlphaIterate> iterations;
  double alpha_final = 0;
  bool converged = false;
  StopReason stop_reason = StopReason::max_iter;
};

struct AdaptiveOptions {
  double C = 1.0;
  double alpha0 = 0;  // <= 0 selects default_alpha0(n, m)
  double tol = 1e-3;
  int max_iter = 15;
};

/// Thrown when a solve inside the adaptive iteration fails; carries the
/// iterates completed before the failure.
class AdaptiveSolveError : public std::runtime_error {
 public:
  AdaptiveSolveError(const std::string& what, AlphaTrace partial);
  const AlphaTrace& partial_trace() const { return partial_; }

 private:
  AlphaTrace partial_;
};

/// Self-consistent update of the a priori rule: solve at alpha^(k), replace
/// sigma n^{-1/2} by the observed discrepancy and xdag_norm by the observed
/// solution norm, stop once the relative alpha change falls below tol. The
/// alpha sequence is monotone from the second iterate on.
AlphaTrace adaptive_alpha(const TikhonovSystem& system, const Eigen::VectorXd& w, int m,
                          const AdaptiveOptions& opt = {});

AlphaTrace adaptive_alpha(const Kernel& kernel, const FemSpace& space, const Observation& obs,
                          int m, double C = 1.0, double alpha0 = 0, double tol = 1e-3,
                          int max_iter = 15);

}  // namespace fredholm
