#include "fredholm/kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "parallel.hpp"

namespace fredholm {

namespace detail {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  const int q = order;
  std::vector<double> x(q), w(q);

  const auto legendre = [q](double t, double& p1, double& dp) {
    double p0 = 1.0;
    p1 = t;
    for (int k = 2; k <= q; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = q * (t * p1 - p0) / (t * t - 1.0);
  };

  for (int i = 0; i < q; ++i) {
    // Chebyshev-type initial guess; Newton on the three-term recurrence.
    double t = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double p1 = 0.0, dp = 0.0;
    for (int iter = 0; iter < 64; ++iter) {
      legendre(t, p1, dp);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(t))) break;
    }
    // the weight needs dp at the settled root, not at the previous iterate
    legendre(t, p1, dp);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }

  // Roots came out descending; store ascending and symmetrize so the rule is
  // exactly even.
  std::vector<double> xs(q), ws(q);
  for (int i = 0; i < q; ++i) {
    xs[i] = x[q - 1 - i];
    ws[i] = w[q - 1 - i];
  }
  for (int i = 0; i < q / 2; ++i) {
    const double node = 0.5 * (xs[q - 1 - i] - xs[i]);
    const double weight = 0.5 * (ws[i] + ws[q - 1 - i]);
    xs[i] = -node;
    xs[q - 1 - i] = node;
    ws[i] = weight;
    ws[q - 1 - i] = weight;
  }
  if (q % 2 == 1) xs[q / 2] = 0.0;
  return {std::move(xs), std::move(ws)};
}

}  // namespace detail

QuadratureRule::QuadratureRule(int order) {
  if (order < 2) throw std::invalid_argument("QuadratureRule: order must be at least 2");
  auto [nodes, weights] = detail::gauss_legendre(order);
  nodes_ = std::move(nodes);
  weights_ = std::move(weights);
}

Kernel::Kernel(KernelKind kind, double a, double b, int m, Eigen::MatrixXd table)
    : kind_(kind), a_(a), b_(b), m_(m), table_(std::move(table)) {}

Kernel Kernel::green() { return Kernel(KernelKind::green, 0.0, 1.0, 2, {}); }

Kernel Kernel::exponential(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("Kernel: domain must satisfy a < b");
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("Kernel: non-finite domain endpoint");
  return Kernel(KernelKind::exponential, a, b, 2, {});
}

Kernel Kernel::tabulated(double a, double b, Eigen::MatrixXd values, int smoothness_m) {
  if (!(a < b)) throw std::invalid_argument("Kernel: domain must satisfy a < b");
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("Kernel: non-finite domain endpoint");
  if (values.rows() < 2 || values.cols() < 2)
    throw std::invalid_argument("Kernel: tabulated grid needs at least 2x2 values");
  if (!values.allFinite()) throw std::invalid_argument("Kernel: non-finite tabulated value");
  if (smoothness_m < 1) throw std::invalid_argument("Kernel: smoothness index must be >= 1");
  return Kernel(KernelKind::tabulated, a, b, smoothness_m, std::move(values));
}

double Kernel::eval_unchecked(double s, double t) const {
  switch (kind_) {
    case KernelKind::green:
      return s <= t ? s * (1.0 - t) : t * (1.0 - s);
    case KernelKind::exponential:
      return std::exp(-std::abs(s - t));
    case KernelKind::tabulated: {
      const Eigen::Index rows = table_.rows();
      const Eigen::Index cols = table_.cols();
      const double scale = 1.0 / (b_ - a_);
      double u = (s - a_) * scale * static_cast<double>(rows - 1);
      double v = (t - a_) * scale * static_cast<double>(cols - 1);
      Eigen::Index i = std::min<Eigen::Index>(rows - 2, std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor(u))));
      Eigen::Index j = std::min<Eigen::Index>(cols - 2, std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor(v))));
      const double fu = u - static_cast<double>(i);
      const double fv = v - static_cast<double>(j);
      return (1.0 - fu) * (1.0 - fv) * table_(i, j) + fu * (1.0 - fv) * table_(i + 1, j) +
             (1.0 - fu) * fv * table_(i, j + 1) + fu * fv * table_(i + 1, j + 1);
    }
  }
  return 0.0;  // unreachable
}

double Kernel::operator()(double s, double t) const {
  if (!(s >= a_ && s <= b_ && t >= a_ && t <= b_))
    throw std::domain_error("Kernel: evaluation point outside the kernel domain");
  return eval_unchecked(s, t);
}

double eval_kernel(const Kernel& kernel, double s, double t) { return kernel(s, t); }

namespace detail {

Eigen::MatrixXd operator_matrix_impl(const Kernel& kernel, const FemSpace& space,
                                     const SampleDesign& samples, const QuadratureRule& quad,
                                     bool split_at_kink, int threads) {
  if (threads < 1) throw std::invalid_argument("operator_matrix: thread count must be >= 1");
  if (space.a() != kernel.domain_a() || space.b() != kernel.domain_b())
    throw std::invalid_argument("operator_matrix: FEM space domain does not match the kernel");
  for (int i = 0; i < samples.size(); ++i) {
    const double s = samples.point(i);
    if (s < kernel.domain_a() || s > kernel.domain_b())
      throw std::invalid_argument("operator_matrix: sample point outside the kernel domain");
  }

  const int n = samples.size();
  const int m = space.node_count();
  const double h = space.mesh_size();
  const auto& xg = quad.nodes();
  const auto& wg = quad.weights();
  const int q = quad.order();
  const bool split = split_at_kink && kernel.has_diagonal_kink();

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, m);

  parallel_for_chunks(0, n, threads, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      const double s = samples.point(static_cast<int>(i));
      for (int e = 0; e < m - 1; ++e) {
        const double t0 = space.node(e);
        const double t1 = space.node(e + 1);
        double bounds[3] = {t0, t1, t1};
        int segments = 1;
        if (split && s > t0 && s < t1) {
          bounds[1] = s;
          bounds[2] = t1;
          segments = 2;
        }
        double left = 0.0, right = 0.0;  // contributions to phi_e, phi_{e+1}
        for (int seg = 0; seg < segments; ++seg) {
          const double mid = 0.5 * (bounds[seg] + bounds[seg + 1]);
          const double half = 0.5 * (bounds[seg + 1] - bounds[seg]);
          for (int p = 0; p < q; ++p) {
            const double t = mid + half * xg[p];
            const double wq = half * wg[p];
            const double kv = kernel.eval_unchecked(s, t);
            const double local = (t - t0) / h;
            left += wq * kv * (1.0 - local);
            right += wq * kv * local;
          }
        }
        g(i, e) += left;
        g(i, e + 1) += right;
      }
    }
  });

  return g;
}

}  // namespace detail

Eigen::MatrixXd operator_matrix(const Kernel& kernel, const FemSpace& space,
                                const SampleDesign& samples, const QuadratureRule& quad,
                                int threads) {
  return detail::operator_matrix_impl(kernel, space, samples, quad, true, threads);
}

Eigen::VectorXd apply_operator(const Eigen::MatrixXd& G, const Eigen::VectorXd& coeffs) {
  if (G.cols() != coeffs.size())
    throw std::invalid_argument("apply_operator: coefficient count does not match matrix");
  return G * coeffs;
}

}  // namespace fredholm
