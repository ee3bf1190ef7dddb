#pragma once

#include <Eigen/Core>

#include "fredholm/design.hpp"
#include "fredholm/fem.hpp"
#include "fredholm/kernel.hpp"

namespace fredholm {

/// Empirical seminorm |v|_n = (1/n sum v_i^2)^{1/2} of a sample-value vector.
double empirical_seminorm(const Eigen::VectorXd& values);

struct AssembledSystem {
  Eigen::MatrixXd A;  // (1/n) G^T G + alpha * mass
  Eigen::VectorXd b;  // (1/n) G^T w
};

/// Normal equations of the penalized least-squares functional
/// |K x - w|_n^2 + alpha ||x||^2 in the FEM basis.
AssembledSystem assemble(const Eigen::MatrixXd& G, const Eigen::MatrixXd& mass,
                         const Eigen::VectorXd& w, double alpha);

/// Dense SPD solve: Cholesky plus iterative refinement, relative residual
/// below 1e-10 or std::runtime_error.
Eigen::VectorXd solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

struct RegularizedSolution {
  FemFunction x;
  double alpha = 0;
  double discrepancy = 0;    // |K x - w|_n
  double solution_norm = 0;  // ||x||_{L2}
  double objective = 0;      // discrepancy^2 + alpha * solution_norm^2
};

/// Discretization of one (kernel, space, design) triple with the forward
/// matrix, Gram matrix and mass matrix precomputed, so repeated solves for
/// different data vectors or alphas only pay for a small dense solve.
class TikhonovSystem {
 public:
  TikhonovSystem(Kernel kernel, FemSpace space, SampleDesign design,
                 QuadratureRule quad = QuadratureRule(), int threads = 1);

  const Kernel& kernel() const { return kernel_; }
  const FemSpace& space() const { return space_; }
  const SampleDesign& design() const { return design_; }
  const Eigen::MatrixXd& forward_matrix() const { return G_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& mass() const { return mass_; }

  /// Minimizer of |K x - w|_n^2 + alpha ||x||^2 over the FEM space.
  RegularizedSolution solve(const Eigen::VectorXd& w, double alpha) const;

  /// (alpha ||v||^2 + |K v|_n^2)^{1/2}; alpha = 0 gives the pure seminorm.
  double energy_norm(const FemFunction& v, double alpha) const;

 private:
  Kernel kernel_;
  FemSpace space_;
  SampleDesign design_;
  Eigen::MatrixXd G_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd mass_;
};

/// One-shot convenience wrapper around TikhonovSystem::solve.
RegularizedSolution solve_regularized(const Kernel& kernel, const FemSpace& space,
                                      const Observation& obs, double alpha,
                                      const QuadratureRule& quad = QuadratureRule(),
                                      int threads = 1);

/// One-shot energy norm (assembles the forward matrix on the fly).
double energy_norm(const Kernel& kernel, const FemSpace& space, const SampleDesign& design,
                   const FemFunction& v, double alpha,
                   const QuadratureRule& quad = QuadratureRule());

}  // namespace fredholm
