#include "fredholm/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fredholm {

SpectralSystem SpectralSystem::analytic_green(int truncation) {
  if (truncation < 1) throw std::invalid_argument("SpectralSystem: truncation must be >= 1");
  SpectralSystem sys;
  sys.basis = Basis::analytic_sine;
  sys.truncation = truncation;
  sys.singular_values.resize(truncation);
  for (int j = 1; j <= truncation; ++j) {
    const double jpi = j * std::numbers::pi;
    sys.singular_values[j - 1] = 1.0 / (jpi * jpi);
  }
  return sys;
}

SpectralSystem SpectralSystem::discrete(Eigen::VectorXd singular_values, Eigen::MatrixXd vectors,
                                        int truncation) {
  if (truncation < 1) throw std::invalid_argument("SpectralSystem: truncation must be >= 1");
  if (singular_values.size() < truncation)
    throw std::invalid_argument("SpectralSystem: fewer singular values than truncation");
  if (vectors.cols() != singular_values.size())
    throw std::invalid_argument("SpectralSystem: vector count does not match values");
  for (Eigen::Index j = 0; j < singular_values.size(); ++j) {
    if (!(singular_values[j] > 0))
      throw std::invalid_argument("SpectralSystem: singular values must be positive");
    if (j > 0 && singular_values[j] > singular_values[j - 1])
      throw std::invalid_argument("SpectralSystem: singular values must be non-increasing");
  }
  SpectralSystem sys;
  sys.basis = Basis::discrete;
  sys.truncation = truncation;
  sys.singular_values = std::move(singular_values);
  sys.vectors = std::move(vectors);
  return sys;
}

Eigen::MatrixXd quadrature_operator_matrix(const Kernel& kernel, int N) {
  if (N < 2) throw std::invalid_argument("quadrature_operator_matrix: N must be >= 2");
  const double a = kernel.domain_a();
  const double b = kernel.domain_b();
  const double h = (b - a) / static_cast<double>(N);
  Eigen::VectorXd mid(N);
  for (int i = 0; i < N; ++i) mid[i] = a + (i + 0.5) * h;

  Eigen::MatrixXd A(N, N);
  for (int i = 0; i < N; ++i) {
    A(i, i) = h * kernel.eval_unchecked(mid[i], mid[i]);
    for (int j = i + 1; j < N; ++j) {
      const double v = h * kernel.eval_unchecked(mid[i], mid[j]);
      A(i, j) = v;
      A(j, i) = h * kernel.eval_unchecked(mid[j], mid[i]);
    }
  }
  return A;
}

Eigen::VectorXd spectrum(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("spectrum: matrix must be square");
  if (A.rows() == 0) throw std::invalid_argument("spectrum: empty matrix");
  const double scale = A.cwiseAbs().maxCoeff();
  const double tol = 1e-12 * std::max(scale, 1.0);
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = i + 1; j < A.cols(); ++j)
      if (std::abs(A(i, j) - A(j, i)) > tol)
        throw std::invalid_argument("spectrum: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectrum: eigenvalue iteration failed to converge");

  Eigen::VectorXd values = solver.eigenvalues();
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end(), [](double x, double y) {
    const double ax = std::abs(x), ay = std::abs(y);
    if (ax != ay) return ax > ay;
    return x > y;  // deterministic tie-break
  });
  for (Eigen::Index i = 0; i < values.size(); ++i) values[i] = sorted[i];
  return values;
}

DecayFit fit_decay(const Eigen::VectorXd& values, int j0, int j1) {
  if (j0 < 1 || j1 > values.size() || j0 >= j1)
    throw std::invalid_argument("fit_decay: window must satisfy 1 <= j0 < j1 <= size");
  const int count = j1 - j0 + 1;
  Eigen::VectorXd logj(count), logs(count);
  for (int j = j0; j <= j1; ++j) {
    const double v = values[j - 1];
    if (!(v > 0)) throw std::domain_error("fit_decay: non-positive value inside the fit window");
    logj[j - j0] = std::log(static_cast<double>(j));
    logs[j - j0] = std::log(v);
  }

  const double xm = logj.mean();
  const double ym = logs.mean();
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < count; ++i) {
    const double dx = logj[i] - xm;
    sxx += dx * dx;
    sxy += dx * (logs[i] - ym);
  }

  DecayFit fit;
  fit.j0 = j0;
  fit.j1 = j1;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  double rss = 0.0;
  for (int i = 0; i < count; ++i) {
    const double r = logs[i] - fit.intercept - fit.slope * logj[i];
    rss += r * r;
  }
  fit.residual_rms = std::sqrt(rss / count);
  return fit;
}

SineProjection::SineProjection(const FemSpace& space, int J) {
  if (J < 1) throw std::invalid_argument("SineProjection: mode count must be >= 1");
  if (space.a() != 0.0 || space.b() != 1.0)
    throw std::invalid_argument("SineProjection: sine basis lives on [0, 1]");

  const int m = space.node_count();
  const double h = space.mesh_size();
  const QuadratureRule quad(5);
  const auto& xg = quad.nodes();
  const auto& wg = quad.weights();
  const double sqrt2 = std::numbers::sqrt2;

  P_ = Eigen::MatrixXd::Zero(J, m);
  for (int j = 1; j <= J; ++j) {
    const double omega = j * std::numbers::pi;
    // Keep roughly one panel per radian of phase across an element.
    const int panels = std::max(1, static_cast<int>(std::ceil(omega * h)));
    for (int e = 0; e < m - 1; ++e) {
      const double t0 = space.node(e);
      const double width = (space.node(e + 1) - t0) / panels;
      double left = 0.0, right = 0.0;
      for (int p = 0; p < panels; ++p) {
        const double mid = t0 + (p + 0.5) * width;
        const double half = 0.5 * width;
        for (std::size_t g = 0; g < xg.size(); ++g) {
          const double t = mid + half * xg[g];
          const double wq = half * wg[g];
          const double sine = sqrt2 * std::sin(omega * t);
          const double local = (t - t0) / h;
          left += wq * sine * (1.0 - local);
          right += wq * sine * local;
        }
      }
      P_(j - 1, e) += left;
      P_(j - 1, e + 1) += right;
    }
  }
}

Eigen::VectorXd SineProjection::coefficients(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != P_.cols())
    throw std::invalid_argument("SineProjection: coefficient count does not match space");
  return P_ * coeffs;
}

Eigen::VectorXd sine_coefficients(const FemFunction& u, int J) {
  return SineProjection(u.space(), J).coefficients(u.coeffs());
}

double wstar_norm(const FemFunction& u, const SpectralSystem& sys) {
  if (sys.basis != SpectralSystem::Basis::analytic_sine)
    throw std::invalid_argument("wstar_norm: requires the analytic sine system");
  const int J = std::min<int>(sys.truncation, static_cast<int>(sys.singular_values.size()));
  const Eigen::VectorXd uj = sine_coefficients(u, J);
  double acc = 0.0;
  for (int j = 0; j < J; ++j) acc += sys.singular_values[j] * uj[j] * uj[j];
  return std::sqrt(acc);
}

}  // namespace fredholm
