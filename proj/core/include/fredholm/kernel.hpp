#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "fredholm/design.hpp"
#include "fredholm/fem.hpp"

namespace fredholm {

enum class KernelKind { green, exponential, tabulated };

/// Bivariate kernel k(s, t) on [a, b]^2 with a declared smoothness index m
/// (the Sobolev order gained by the integral operator).
class Kernel {
 public:
  /// Green's function of -d^2/dt^2 with zero boundary values on [0, 1]:
  /// k(s, t) = s(1 - t) for s <= t, t(1 - s) otherwise. m = 2.
  static Kernel green();

  /// k(s, t) = exp(-|s - t|) on [a, b]^2. m = 2.
  static Kernel exponential(double a = 0.0, double b = 1.0);

  /// Kernel given by samples on a uniform grid over [a, b]^2 (values(i, j) =
  /// k(s_i, t_j)), evaluated by bilinear interpolation. The smoothness index
  /// is declared by the caller.
  static Kernel tabulated(double a, double b, Eigen::MatrixXd values, int smoothness_m);

  KernelKind kind() const { return kind_; }
  double domain_a() const { return a_; }
  double domain_b() const { return b_; }
  int smoothness() const { return m_; }

  /// Both built-in kernels have a slope discontinuity across s == t, which
  /// quadrature must respect by splitting elements there.
  bool has_diagonal_kink() const { return kind_ != KernelKind::tabulated; }

  /// k(s, t); throws std::domain_error outside [a, b]^2.
  double operator()(double s, double t) const;

  /// k(s, t) without the domain check (hot loops whose points are inside by
  /// construction).
  double eval_unchecked(double s, double t) const;

 private:
  Kernel(KernelKind kind, double a, double b, int m, Eigen::MatrixXd table);

  KernelKind kind_;
  double a_;
  double b_;
  int m_;
  Eigen::MatrixXd table_;
};

/// Checked evaluation, equivalent to kernel(s, t).
double eval_kernel(const Kernel& kernel, double s, double t);

/// Gauss-Legendre rule with `order` points, nodes on [-1, 1], exact for
/// polynomials of degree <= 2*order - 1.
class QuadratureRule {
 public:
  explicit QuadratureRule(int order = 5);

  int order() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Forward matrix G with G(i, j) = integral of k(s_i, t) phi_j(t) dt,
/// composite Gauss per mesh element, elements split at t = s_i for kinked
/// kernels. Rows may be computed in parallel; the summation order within a
/// row is fixed, so the result is bitwise identical for any thread count.
Eigen::MatrixXd operator_matrix(const Kernel& kernel, const FemSpace& space,
                                const SampleDesign& samples,
                                const QuadratureRule& quad = QuadratureRule(),
                                int threads = 1);

/// Sampled operator image (K x)(s_i) of the FEM function with the given
/// coefficients: G * coeffs.
Eigen::VectorXd apply_operator(const Eigen::MatrixXd& G, const Eigen::VectorXd& coeffs);

namespace detail {

// split_at_kink = false skips subdividing elements at t = s_i; only the
// quadrature refinement tests use that path.
Eigen::MatrixXd operator_matrix_impl(const Kernel& kernel, const FemSpace& space,
                                     const SampleDesign& samples, const QuadratureRule& quad,
                                     bool split_at_kink, int threads);

// Nodes and weights on [-1, 1], computed by Newton iteration on the Legendre
// recurrence.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order);

}  // namespace detail

}  // namespace fredholm
