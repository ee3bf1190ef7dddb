#pragma once

#include <Eigen/Core>

#include <functional>

namespace fredholm {

/// Uniform 1-D mesh on [a, b] carrying the continuous piecewise-linear nodal
/// basis. Nodes are t_j = a + j h, j = 0..M-1, with h = (b - a)/(M - 1).
class FemSpace {
 public:
  FemSpace(double a, double b, int node_count);

  /// Space whose mesh size is closest to the requested h.
  static FemSpace with_mesh_size(double a, double b, double h);

  double a() const { return a_; }
  double b() const { return b_; }
  int node_count() const { return node_count_; }
  int element_count() const { return node_count_ - 1; }
  double mesh_size() const { return h_; }

  double node(int j) const;

  /// Value of the hat function centered at node j; zero outside its support.
  double basis_value(int j, double t) const;

  bool operator==(const FemSpace& other) const {
    return a_ == other.a_ && b_ == other.b_ && node_count_ == other.node_count_;
  }

 private:
  double a_;
  double b_;
  int node_count_;
  double h_;
};

/// Element of the FEM space, stored by nodal values.
class FemFunction {
 public:
  FemFunction(FemSpace space, Eigen::VectorXd coeffs);

  const FemSpace& space() const { return space_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }

  /// Piecewise-linear evaluation; t is clamped to [a, b].
  double eval(double t) const;

 private:
  FemSpace space_;
  Eigen::VectorXd coeffs_;
};

/// Exact mass matrix (phi_j, phi_i)_{L2}: symmetric positive definite
/// tridiagonal with interior diagonal 2h/3, off-diagonal h/6 and boundary
/// diagonal h/3, returned dense.
Eigen::MatrixXd mass_matrix(const FemSpace& space);

/// Nodal interpolant of f. Throws std::runtime_error if f returns a
/// non-finite value at a node.
FemFunction interpolate(const FemSpace& space, const std::function<double(double)>& f);

/// L2 norm sqrt(c^T M c) via the exact mass matrix.
double l2_norm(const FemFunction& u);

}  // namespace fredholm
