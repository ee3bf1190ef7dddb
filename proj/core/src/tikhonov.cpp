#include "fredholm/tikhonov.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace fredholm {

double empirical_seminorm(const Eigen::VectorXd& values) {
  const Eigen::Index n = values.size();
  if (n == 0) throw std::invalid_argument("empirical_seminorm: empty vector");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) acc += values[i] * values[i];
  return std::sqrt(acc / static_cast<double>(n));
}

AssembledSystem assemble(const Eigen::MatrixXd& G, const Eigen::MatrixXd& mass,
                         const Eigen::VectorXd& w, double alpha) {
  const Eigen::Index n = G.rows();
  const Eigen::Index m = G.cols();
  if (n == 0 || m == 0) throw std::invalid_argument("assemble: empty forward matrix");
  if (mass.rows() != m || mass.cols() != m)
    throw std::invalid_argument("assemble: mass matrix size does not match basis");
  if (w.size() != n) throw std::invalid_argument("assemble: data length does not match samples");
  if (!(alpha > 0) || !std::isfinite(alpha))
    throw std::invalid_argument("assemble: alpha must be positive and finite");

  const double inv_n = 1.0 / static_cast<double>(n);
  AssembledSystem sys;
  sys.A = (G.transpose() * G) * inv_n + alpha * mass;
  sys.b = (G.transpose() * w) * inv_n;
  return sys;
}

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() != A.cols()) throw std::invalid_argument("solve_spd: matrix must be square");
  if (A.rows() != b.size())
    throw std::invalid_argument("solve_spd: right-hand side length does not match matrix");
  if (!A.allFinite() || !b.allFinite())
    throw std::runtime_error("solve_spd: non-finite entries in the linear system");

  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("solve_spd: Cholesky factorization failed (matrix not SPD)");

  Eigen::VectorXd c = llt.solve(b);
  const double b_norm = b.norm();
  // One or two refinement passes keep the relative residual near round-off
  // even when alpha is tiny and the system is ill-conditioned.
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd r = b - A * c;
    if (b_norm == 0.0 || r.norm() <= 1e-14 * b_norm) break;
    c += llt.solve(r);
  }
  if (!c.allFinite()) throw std::runtime_error("solve_spd: solve produced non-finite values");
  return c;
}

TikhonovSystem::TikhonovSystem(Kernel kernel, FemSpace space, SampleDesign design,
                               QuadratureRule quad, int threads)
    : kernel_(std::move(kernel)),
      space_(space),
      design_(std::move(design)),
      G_(operator_matrix(kernel_, space_, design_, quad, threads)),
      gram_((G_.transpose() * G_) / static_cast<double>(design_.size())),
      mass_(mass_matrix(space_)) {}

RegularizedSolution TikhonovSystem::solve(const Eigen::VectorXd& w, double alpha) const {
  if (w.size() != design_.size())
    throw std::invalid_argument("TikhonovSystem: data length does not match design size");
  if (!(alpha > 0) || !std::isfinite(alpha))
    throw std::invalid_argument("TikhonovSystem: alpha must be positive and finite");

  const double inv_n = 1.0 / static_cast<double>(design_.size());
  const Eigen::VectorXd b = (G_.transpose() * w) * inv_n;
  const Eigen::MatrixXd A = gram_ + alpha * mass_;
  Eigen::VectorXd c = solve_spd(A, b);

  RegularizedSolution sol{FemFunction(space_, std::move(c)), alpha, 0.0, 0.0, 0.0};
  sol.discrepancy = empirical_seminorm(G_ * sol.x.coeffs() - w);
  sol.solution_norm = std::sqrt(std::max(0.0, sol.x.coeffs().dot(mass_ * sol.x.coeffs())));
  sol.objective = sol.discrepancy * sol.discrepancy + alpha * sol.solution_norm * sol.solution_norm;
  return sol;
}

double TikhonovSystem::energy_norm(const FemFunction& v, double alpha) const {
  if (!(v.space() == space_))
    throw std::invalid_argument("TikhonovSystem: function lives on a different space");
  if (!(alpha >= 0) || !std::isfinite(alpha))
    throw std::invalid_argument("TikhonovSystem: alpha must be non-negative and finite");
  const double seminorm = empirical_seminorm(G_ * v.coeffs());
  const double norm_sq = std::max(0.0, v.coeffs().dot(mass_ * v.coeffs()));
  return std::sqrt(alpha * norm_sq + seminorm * seminorm);
}

RegularizedSolution solve_regularized(const Kernel& kernel, const FemSpace& space,
                                      const Observation& obs, double alpha,
                                      const QuadratureRule& quad, int threads) {
  TikhonovSystem system(kernel, space, obs.design(), quad, threads);
  return system.solve(obs.w(), alpha);
}

double energy_norm(const Kernel& kernel, const FemSpace& space, const SampleDesign& design,
                   const FemFunction& v, double alpha, const QuadratureRule& quad) {
  TikhonovSystem system(kernel, space, design, quad, 1);
  return system.energy_norm(v, alpha);
}

}  // namespace fredholm
