#include "fredholm/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "parallel.hpp"

namespace fredholm {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double xm = x.mean();
  const double ym = y.mean();
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double dx = x[i] - xm;
    const double dy = y[i] - ym;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("std_normal_quantile: p must lie strictly inside (0, 1)");

  // Wichura's PPND16 rational approximations, then Newton steps against the
  // erfc-based CDF to pin the result at machine precision.
  const double q = p - 0.5;
  double x;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    x = q *
        (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
             45921.953931549871457) * r +
            13731.693765509461125) * r +
           1971.5909503065514427) * r +
          133.14166789178437745) * r +
         3.387132872796366608) /
        (((((((5226.495278852545703 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
             21213.794301586595867) * r +
            5394.1960214247511077) * r +
           687.1870074920579083) * r +
          42.313330701600911252) * r +
         1.0);
  } else {
    double r = std::sqrt(-std::log(std::min(p, 1.0 - p)));
    if (r <= 5.0) {
      r -= 1.6;
      x = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r +
               1.27045825245236838258) * r +
              3.64784832476320460504) * r +
             5.7694972214606914055) * r +
            4.6303378461565452959) * r +
           1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r +
               0.14810397642748007459) * r +
              0.68976733498510000455) * r +
             1.6763848301838038494) * r +
            2.05319162663775882187) * r +
           1.0);
    } else {
      r -= 5.0;
      x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r +
               0.026532189526576123093) * r +
              0.29656057182850489123) * r +
             1.7848265399172913358) * r +
            5.4637849111641143699) * r +
           6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r +
             0.13692988092273580531) * r +
            0.59983220655588793769) * r +
           1.0);
    }
    if (q < 0.0) x = -x;
  }

  for (int step = 0; step < 2; ++step) {
    const double err = normal_cdf(x) - p;
    const double d = normal_pdf(x);
    if (d == 0.0) break;
    x -= err / d;
  }
  return x;
}

NoiseModel NoiseModel::gaussian(double sigma) {
  if (!(sigma >= 0) || !std::isfinite(sigma))
    throw std::invalid_argument("NoiseModel: sigma must be non-negative and finite");
  NoiseModel model;
  model.sigma = sigma;
  return model;
}

NoiseModel NoiseModel::relative(double delta, const std::function<double(double)>& y,
                                const SampleDesign& design, int refine) {
  if (!(delta >= 0) || !std::isfinite(delta))
    throw std::invalid_argument("NoiseModel: delta must be non-negative and finite");
  if (!y) throw std::invalid_argument("NoiseModel: data function is empty");
  if (refine < 1) throw std::invalid_argument("NoiseModel: refine factor must be >= 1");
  if (design.size() < 2) throw std::invalid_argument("NoiseModel: design needs >= 2 points");

  // Read the sup norm of the data off a grid `refine` times finer than the
  // design; this fixes how delta is converted to an absolute sigma.
  const int fine = (design.size() - 1) * refine + 1;
  const double a = design.domain_a();
  const double b = design.domain_b();
  double sup = 0.0;
  for (int i = 0; i < fine; ++i) {
    const double s = (i == fine - 1) ? b : a + i * (b - a) / (fine - 1);
    sup = std::max(sup, std::abs(y(s)));
  }

  NoiseModel model;
  model.sigma = delta * sup;
  model.delta = delta;
  return model;
}

SampleDesign make_design(int n, double a, double b) {
  if (n < 2) throw std::invalid_argument("make_design: need at least 2 sample points");
  if (!(a < b)) throw std::invalid_argument("make_design: domain must satisfy a < b");
  Eigen::VectorXd points(n);
  for (int i = 0; i < n; ++i) points[i] = a + i * (b - a) / (n - 1);
  points[n - 1] = b;
  return SampleDesign(std::move(points), a, b);
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial) {
  return mix64(base_seed + (trial + 1) * kGolden);
}

Eigen::VectorXd gen_noise(const NoiseModel& model, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_noise: need at least one draw");
  if (!(model.sigma >= 0) || !std::isfinite(model.sigma))
    throw std::invalid_argument("gen_noise: sigma must be non-negative and finite");
  Eigen::VectorXd out(n);
  if (model.sigma == 0.0) {
    out.setZero();
    return out;
  }

  // Box-Muller over raw mt19937_64 words: std::normal_distribution is
  // implementation-defined, this stream is reproducible everywhere.
  std::mt19937_64 eng(seed);
  auto uniform = [&eng] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < n; i += 2) {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[i] = model.sigma * (radius * std::cos(angle));
    if (i + 1 < n) out[i + 1] = model.sigma * (radius * std::sin(angle));
  }
  return out;
}

AlphaRule AlphaRule::a_priori(double C) {
  AlphaRule rule;
  rule.kind = Kind::a_priori;
  rule.C = C;
  return rule;
}

AlphaRule AlphaRule::adaptive(double C, double tol, int max_iter) {
  AlphaRule rule;
  rule.kind = Kind::adaptive;
  rule.C = C;
  rule.tol = tol;
  rule.max_iter = max_iter;
  return rule;
}

AlphaRule AlphaRule::fixed(double alpha) {
  AlphaRule rule;
  rule.kind = Kind::fixed;
  rule.alpha = alpha;
  return rule;
}

TrialFailure::TrialFailure(int trial, std::uint64_t seed, const std::string& what)
    : std::runtime_error("trial " + std::to_string(trial) + " (seed " + std::to_string(seed) +
                         "): " + what),
      trial_(trial),
      seed_(seed) {}

namespace {

Eigen::VectorXd data_samples(const Problem& problem, const TikhonovSystem& system,
                             const Eigen::VectorXd& truth_coeffs) {
  const SampleDesign& design = system.design();
  if (problem.data) {
    Eigen::VectorXd y(design.size());
    for (int i = 0; i < design.size(); ++i) y[i] = problem.data(design.point(i));
    return y;
  }
  return system.forward_matrix() * truth_coeffs;
}

double resolve_sigma(const Problem& problem, const SampleDesign& design,
                     const Eigen::VectorXd& y_points, double level, bool relative) {
  if (!relative) return level;
  if (problem.data) return NoiseModel::relative(level, problem.data, design).sigma;
  return level * y_points.cwiseAbs().maxCoeff();
}

struct MetricContext {
  ErrorMetric metric;
  const Eigen::VectorXd* truth_coeffs;
  const Eigen::VectorXd* y_points;
  const SineProjection* projection;      // wstar only
  const Eigen::VectorXd* weights;        // wstar only: singular values
};

double trial_error(const MetricContext& ctx, const TikhonovSystem& system,
                   const Eigen::VectorXd& coeffs) {
  switch (ctx.metric) {
    case ErrorMetric::empirical:
      return empirical_seminorm(system.forward_matrix() * coeffs - *ctx.y_points);
    case ErrorMetric::l2:
      return l2_norm(FemFunction(system.space(), coeffs - *ctx.truth_coeffs));
    case ErrorMetric::wstar: {
      const Eigen::VectorXd uj = ctx.projection->coefficients(coeffs - *ctx.truth_coeffs);
      double acc = 0.0;
      for (Eigen::Index j = 0; j < uj.size(); ++j) acc += (*ctx.weights)[j] * uj[j] * uj[j];
      return std::sqrt(acc);
    }
  }
  return 0.0;  // unreachable
}

}  // namespace

RateResult mc_error_expectation(const McConfig& cfg, const Problem& problem, int threads) {
  if (cfg.trials < 1) throw std::invalid_argument("mc_error_expectation: trials must be >= 1");
  if (cfg.n_grid.empty() || cfg.noise_grid.empty())
    throw std::invalid_argument("mc_error_expectation: empty n or noise grid");
  for (int n : cfg.n_grid)
    if (n < 2) throw std::invalid_argument("mc_error_expectation: n must be >= 2");
  for (double v : cfg.noise_grid)
    if (!(v >= 0) || !std::isfinite(v))
      throw std::invalid_argument("mc_error_expectation: noise levels must be non-negative");
  if (!problem.xdag) throw std::invalid_argument("mc_error_expectation: problem has no truth");
  if (cfg.alpha_rule.kind == AlphaRule::Kind::fixed && !(cfg.alpha_rule.alpha > 0))
    throw std::invalid_argument("mc_error_expectation: fixed alpha must be positive");
  if (cfg.wstar_truncation < 1)
    throw std::invalid_argument("mc_error_expectation: truncation must be >= 1");

  const int m = problem.kernel.smoothness();
  const Eigen::VectorXd truth_coeffs = interpolate(problem.space, problem.xdag).coeffs();

  // Rate normalizations: the error bounds carry ||xdag|| to a metric-specific
  // power p; dividing it out lets instances of different size share one line.
  double p = 0.0;
  std::optional<double> theory;
  switch (cfg.which_error) {
    case ErrorMetric::empirical:
      p = 2.0 / (2.0 * m + 1.0);
      theory = 4.0 * m / (2.0 * m + 1.0);
      break;
    case ErrorMetric::wstar:
      p = (2.0 * m + 2.0) / (2.0 * m + 1.0);
      theory = 2.0 * m / (2.0 * m + 1.0);
      break;
    case ErrorMetric::l2:
      p = 0.0;
      break;
  }

  std::optional<SineProjection> projection;
  Eigen::VectorXd weights;
  if (cfg.which_error == ErrorMetric::wstar) {
    projection.emplace(problem.space, cfg.wstar_truncation);
    weights = SpectralSystem::analytic_green(cfg.wstar_truncation).singular_values;
  }

  RateResult result;
  result.normalization_exponent = p;
  result.theory_slope = theory;

  std::uint64_t point_index = 0;
  for (int n : cfg.n_grid) {
    const SampleDesign design = make_design(n, problem.space.a(), problem.space.b());
    const TikhonovSystem system(problem.kernel, problem.space, design, QuadratureRule(), threads);
    const Eigen::VectorXd y_points = data_samples(problem, system, truth_coeffs);

    MetricContext ctx{cfg.which_error, &truth_coeffs, &y_points,
                      projection ? &*projection : nullptr, &weights};

    for (double level : cfg.noise_grid) {
      const double sigma = resolve_sigma(problem, design, y_points, level, cfg.noise_is_relative);
      const std::uint64_t point_seed = trial_seed(cfg.base_seed, point_index++);
      const NoiseModel noise = NoiseModel::gaussian(sigma);

      double fixed_alpha = 0.0;
      if (cfg.alpha_rule.kind == AlphaRule::Kind::a_priori) {
        PriorRuleInputs inputs;
        inputs.sigma = sigma;
        inputs.n = n;
        inputs.xdag_norm = problem.xdag_norm;
        inputs.m = m;
        inputs.C = cfg.alpha_rule.C;
        fixed_alpha = a_priori_alpha(inputs);
        if (!(fixed_alpha > 0))
          throw std::invalid_argument(
              "mc_error_expectation: a priori rule produced a non-positive alpha (zero noise?)");
      } else if (cfg.alpha_rule.kind == AlphaRule::Kind::fixed) {
        fixed_alpha = cfg.alpha_rule.alpha;
      }

      Eigen::VectorXd sq_errors(cfg.trials);
      detail::parallel_for_chunks(0, cfg.trials, threads, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t t = lo; t < hi; ++t) {
          const std::uint64_t seed = trial_seed(point_seed, static_cast<std::uint64_t>(t));
          try {
            const Eigen::VectorXd w = y_points + gen_noise(noise, n, seed);
            double alpha = fixed_alpha;
            if (cfg.alpha_rule.kind == AlphaRule::Kind::adaptive) {
              AdaptiveOptions opt;
              opt.C = cfg.alpha_rule.C;
              opt.tol = cfg.alpha_rule.tol;
              opt.max_iter = cfg.alpha_rule.max_iter;
              alpha = adaptive_alpha(system, w, m, opt).alpha_final;
            }
            const RegularizedSolution sol = system.solve(w, alpha);
            const double err = trial_error(ctx, system, sol.x.coeffs());
            sq_errors[t] = err * err;
          } catch (const std::exception& e) {
            throw TrialFailure(static_cast<int>(t), seed, e.what());
          }
        }
      });

      double acc = 0.0;
      for (int t = 0; t < cfg.trials; ++t) acc += sq_errors[t];
      const double mean_sq = acc / cfg.trials;

      RatePoint point;
      point.n = n;
      point.sigma = sigma;
      point.eta = sigma / std::sqrt(static_cast<double>(n));
      point.mean_sq_error = mean_sq;
      point.normalized =
          problem.xdag_norm > 0 ? mean_sq / std::pow(problem.xdag_norm, p) : mean_sq;
      result.points.push_back(point);
    }
  }

  std::stable_sort(result.points.begin(), result.points.end(),
                   [](const RatePoint& x, const RatePoint& y) {
                     if (x.eta != y.eta) return x.eta < y.eta;
                     return x.n < y.n;
                   });

  std::vector<double> xs, ys;
  for (const RatePoint& point : result.points) {
    if (point.eta > 0 && point.normalized > 0) {
      xs.push_back(point.eta);
      ys.push_back(point.normalized);
    }
  }
  if (xs.size() >= 2 && *std::max_element(xs.begin(), xs.end()) >
                            *std::min_element(xs.begin(), xs.end())) {
    const LogLogFit fit = fit_loglog(Eigen::Map<const Eigen::VectorXd>(xs.data(), xs.size()),
                                     Eigen::Map<const Eigen::VectorXd>(ys.data(), ys.size()));
    result.fit_valid = true;
    result.slope = fit.slope;
    result.intercept = fit.intercept;
  }
  return result;
}

TailResult tail_experiment(const Problem& problem, int n, double delta, double alpha, int trials,
                           std::uint64_t base_seed, int threads) {
  if (trials < 100) throw std::invalid_argument("tail_experiment: need at least 100 trials");
  if (n < 2) throw std::invalid_argument("tail_experiment: n must be >= 2");
  if (!(delta >= 0) || !std::isfinite(delta))
    throw std::invalid_argument("tail_experiment: delta must be non-negative");
  if (!(alpha > 0) || !std::isfinite(alpha))
    throw std::invalid_argument("tail_experiment: alpha must be positive");
  if (!problem.xdag) throw std::invalid_argument("tail_experiment: problem has no truth");

  const SampleDesign design = make_design(n, problem.space.a(), problem.space.b());
  const TikhonovSystem system(problem.kernel, problem.space, design, QuadratureRule(), threads);
  const Eigen::VectorXd truth_coeffs = interpolate(problem.space, problem.xdag).coeffs();
  const Eigen::VectorXd y_points = data_samples(problem, system, truth_coeffs);
  const double sigma = resolve_sigma(problem, design, y_points, delta, true);
  const NoiseModel noise = NoiseModel::gaussian(sigma);

  TailResult result;
  result.alpha = alpha;
  result.sigma = sigma;
  result.errors.resize(trials);

  detail::parallel_for_chunks(0, trials, threads, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t t = lo; t < hi; ++t) {
      const std::uint64_t seed = trial_seed(base_seed, static_cast<std::uint64_t>(t));
      try {
        const Eigen::VectorXd w = y_points + gen_noise(noise, n, seed);
        const RegularizedSolution sol = system.solve(w, alpha);
        result.errors[t] = empirical_seminorm(system.forward_matrix() * sol.x.coeffs() - y_points);
      } catch (const std::exception& e) {
        throw TrialFailure(static_cast<int>(t), seed, e.what());
      }
    }
  });

  const double mean = result.errors.mean();
  double var = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double d = result.errors[t] - mean;
    var += d * d;
  }
  var /= (trials - 1);
  const double sd = std::sqrt(var);

  const double lo = result.errors.minCoeff();
  const double hi = result.errors.maxCoeff();
  if (sd == 0.0 || hi == lo) {
    result.degenerate = true;
    result.histogram.push_back({lo, hi, trials});
    result.qq_correlation = 0.0;
    return result;
  }

  const int bins = std::clamp(static_cast<int>(std::lround(std::sqrt(double(trials)))), 10, 60);
  result.histogram.resize(bins);
  const double width = (hi - lo) / bins;
  for (int k = 0; k < bins; ++k) {
    result.histogram[k].lo = lo + k * width;
    result.histogram[k].hi = (k == bins - 1) ? hi : lo + (k + 1) * width;
    result.histogram[k].count = 0;
  }
  for (int t = 0; t < trials; ++t) {
    int k = static_cast<int>((result.errors[t] - lo) / width);
    k = std::clamp(k, 0, bins - 1);
    ++result.histogram[k].count;
  }

  std::vector<double> sorted(result.errors.data(), result.errors.data() + trials);
  std::sort(sorted.begin(), sorted.end());
  Eigen::VectorXd quantiles(trials), standardized(trials);
  for (int i = 0; i < trials; ++i) {
    quantiles[i] = std_normal_quantile((i + 0.5) / trials);
    standardized[i] = (sorted[i] - mean) / sd;
    result.qq_points.push_back({quantiles[i], standardized[i]});
  }
  result.qq_correlation = pearson(quantiles, standardized);
  return result;
}

LogLogFit fit_loglog(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_loglog: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("fit_loglog: need at least two points");
  Eigen::VectorXd lx(xs.size()), ly(ys.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0) || !(ys[i] > 0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      throw std::domain_error("fit_loglog: entries must be positive and finite");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  const double xm = lx.mean();
  const double ym = ly.mean();
  double sxx = 0.0, sxy = 0.0;
  for (Eigen::Index i = 0; i < lx.size(); ++i) {
    const double dx = lx[i] - xm;
    sxx += dx * dx;
    sxy += dx * (ly[i] - ym);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog: needs two distinct x values");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  return fit;
}

}  // namespace fredholm
