#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fredholm/design.hpp"
#include "fredholm/param_select.hpp"
#include "fredholm/problems.hpp"
#include "fredholm/spectral.hpp"
#include "fredholm/tikhonov.hpp"

namespace fredholm {

struct NoiseModel {
  double sigma = 0;             // Gaussian standard deviation, >= 0
  std::optional<double> delta;  // relative level sigma was derived from, if any

  static NoiseModel gaussian(double sigma);

  /// sigma = delta * max |y| where the sup is taken over a grid `refine`
  /// times finer than the design (the design's own resolution decides how
  /// the sup norm is read off).
  static NoiseModel relative(double delta, const std::function<double(double)>& y,
                             const SampleDesign& design, int refine = 10);
};

/// Equispaced design s_i = a + i (b - a)/(n - 1), i = 0..n-1; n >= 2.
SampleDesign make_design(int n, double a, double b);

/// Per-trial seed: splitmix64 finalizer over base_seed + (trial+1) * golden,
/// so trials are independent streams and any subset can be regenerated.
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial);

/// n i.i.d. N(0, sigma^2) draws. Box-Muller over a seeded mt19937_64, so a
/// given (sigma, n, seed) yields a bitwise-identical vector on every
/// platform. sigma = 0 returns exact zeros.
Eigen::VectorXd gen_noise(const NoiseModel& model, int n, std::uint64_t seed);

enum class ErrorMetric { empirical, wstar, l2 };

struct AlphaRule {
  enum class Kind { a_priori, adaptive, fixed };

  Kind kind = Kind::a_priori;
  double C = 1.0;    // constant for a_priori / adaptive
  double alpha = 0;  // value for fixed
  double tol = 1e-3;
  int max_iter = 15;

  static AlphaRule a_priori(double C = 1.0);
  static AlphaRule adaptive(double C = 1.0, double tol = 1e-3, int max_iter = 15);
  static AlphaRule fixed(double alpha);
};

struct McConfig {
  int trials = 500;
  std::uint64_t base_seed = 0;
  std::vector<int> n_grid;
  std::vector<double> noise_grid;  // delta values when noise_is_relative, else sigma
  bool noise_is_relative = true;
  ErrorMetric which_error = ErrorMetric::empirical;
  AlphaRule alpha_rule;
  int wstar_truncation = 64;
};

struct RatePoint {
  int n = 0;
  double sigma = 0;
  double eta = 0;  // sigma n^{-1/2}
  double mean_sq_error = 0;
  double normalized = 0;  // mean_sq_error / ||xdag||^p
};

struct RateResult {
  std::vector<RatePoint> points;  // sorted by eta, ties by n
  bool fit_valid = false;
  double slope = 0;
  double intercept = 0;
  double normalization_exponent = 0;     // the p in ||xdag||^p divided out
  std::optional<double> theory_slope;    // 4m/(2m+1) resp. half of it; empty for l2
};

/// Thrown when one Monte Carlo trial fails; identifies the trial and seed so
/// the run is reproducible in isolation.
class TrialFailure : public std::runtime_error {
 public:
  TrialFailure(int trial, std::uint64_t seed, const std::string& what);
  int trial() const { return trial_; }
  std::uint64_t seed() const { return seed_; }

 private:
  int trial_;
  std::uint64_t seed_;
};

/// Monte Carlo estimate of the expected squared error over an (n, noise)
/// grid, followed by a log-log fit of the normalized errors against
/// eta = sigma n^{-1/2}. Trials are averaged in trial order regardless of
/// thread count, so results are bitwise reproducible.
RateResult mc_error_expectation(const McConfig& cfg, const Problem& problem, int threads = 1);

struct TailResult {
  Eigen::VectorXd errors;  // per-trial |K(x - xdag)|_n in trial order
  struct Bin {
    double lo = 0, hi = 0;
    long count = 0;
  };
  std::vector<Bin> histogram;
  std::vector<std::array<double, 2>> qq_points;  // (normal quantile, standardized error)
  double qq_correlation = 0;
  bool degenerate = false;  // all errors identical (e.g. zero noise)
  double alpha = 0;
  double sigma = 0;
};

/// Distribution of the prediction error at a fixed alpha over repeated noise
/// draws: histogram, normal QQ pairs and their correlation. trials >= 100.
TailResult tail_experiment(const Problem& problem, int n, double delta, double alpha,
                           int trials, std::uint64_t base_seed, int threads = 1);

struct LogLogFit {
  double intercept = 0;
  double slope = 0;
};

/// Least-squares fit log y ~ intercept + slope log x; all entries positive.
LogLogFit fit_loglog(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys);

/// Inverse standard normal CDF (Wichura's PPND16 rational approximations,
/// good to ~1e-15 relative); p in (0, 1).
double std_normal_quantile(double p);

}  // namespace fredholm
