#pragma once

#include <Eigen/Core>

#include "fredholm/fem.hpp"
#include "fredholm/kernel.hpp"

namespace fredholm {

/// Eigsystem of the integral operator used for dual-norm evaluation and
/// decay studies. The analytic variant is the sine system of the Green
/// kernel on [0, 1]: phi_j(t) = sqrt(2) sin(j pi t), s_j = (j pi)^{-2}. The
/// discrete variant stores eigenpairs of a quadrature discretization.
struct SpectralSystem {
  enum class Basis { analytic_sine, discrete };

  Basis basis = Basis::analytic_sine;
  Eigen::VectorXd singular_values;  // positive, non-increasing
  Eigen::MatrixXd vectors;          // discrete basis only: column j is the j-th eigenvector
  int truncation = 64;

  static SpectralSystem analytic_green(int truncation = 64);
  static SpectralSystem discrete(Eigen::VectorXd singular_values, Eigen::MatrixXd vectors,
                                 int truncation);
};

struct DecayFit {
  double slope = 0;
  double intercept = 0;
  int j0 = 1;  // fit window, 1-based inclusive
  int j1 = 1;
  double residual_rms = 0;
};

/// Midpoint collocation matrix A(i, j) = h k(s_i, t_j) with t_j the N cell
/// midpoints of [a, b] and h = (b - a)/N; symmetric whenever k is.
Eigen::MatrixXd quadrature_operator_matrix(const Kernel& kernel, int N);

/// Eigenvalues of a symmetric matrix, sorted by descending magnitude.
/// Throws std::invalid_argument if the matrix is not symmetric.
Eigen::VectorXd spectrum(const Eigen::MatrixXd& A);

/// Least-squares fit log s_j ~ intercept + slope log j over j in [j0, j1]
/// (1-based). All values in the window must be positive.
DecayFit fit_decay(const Eigen::VectorXd& values, int j0, int j1);

/// Matrix of L2 inner products of the FEM hat functions against
/// sqrt(2) sin(j pi t), j = 1..J (rows). Quadrature panels are subdivided in
/// proportion to j pi h so the oscillatory integrands stay resolved.
class SineProjection {
 public:
  SineProjection(const FemSpace& space, int J);

  const Eigen::MatrixXd& matrix() const { return P_; }
  int modes() const { return static_cast<int>(P_.rows()); }

  /// Coefficients (u, phi_j) for the FEM function with nodal values coeffs.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& coeffs) const;

 private:
  Eigen::MatrixXd P_;
};

/// Sine-basis coefficients (u, sqrt(2) sin(j pi .)), j = 1..J.
Eigen::VectorXd sine_coefficients(const FemFunction& u, int J);

/// Truncated dual-space norm (sum_{j<=J} s_j (u, phi_j)^2)^{1/2} in the
/// analytic sine system; requires sys.basis == analytic_sine and u on [0, 1].
double wstar_norm(const FemFunction& u, const SpectralSystem& sys);

}  // namespace fredholm
