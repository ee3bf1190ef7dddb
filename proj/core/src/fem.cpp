#include "fredholm/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace fredholm {

FemSpace::FemSpace(double a, double b, int node_count)
    : a_(a), b_(b), node_count_(node_count) {
  if (!(a < b)) throw std::invalid_argument("FemSpace: domain must satisfy a < b");
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("FemSpace: non-finite domain endpoint");
  if (node_count < 2) throw std::invalid_argument("FemSpace: need at least 2 nodes");
  h_ = (b_ - a_) / (node_count_ - 1);
}

FemSpace FemSpace::with_mesh_size(double a, double b, double h) {
  if (!(h > 0)) throw std::invalid_argument("FemSpace: mesh size must be positive");
  const int nodes = static_cast<int>(std::lround((b - a) / h)) + 1;
  return FemSpace(a, b, std::max(nodes, 2));
}

double FemSpace::node(int j) const {
  if (j < 0 || j >= node_count_) throw std::invalid_argument("FemSpace: node index out of range");
  if (j == node_count_ - 1) return b_;
  return a_ + j * h_;
}

double FemSpace::basis_value(int j, double t) const {
  if (j < 0 || j >= node_count_) throw std::invalid_argument("FemSpace: node index out of range");
  const double d = std::abs(t - node(j)) / h_;
  return d >= 1.0 ? 0.0 : 1.0 - d;
}

FemFunction::FemFunction(FemSpace space, Eigen::VectorXd coeffs)
    : space_(space), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != space_.node_count())
    throw std::invalid_argument("FemFunction: coefficient count does not match node count");
}

double FemFunction::eval(double t) const {
  const double a = space_.a();
  const double h = space_.mesh_size();
  t = std::clamp(t, a, space_.b());
  int e = static_cast<int>(std::floor((t - a) / h));
  e = std::max(0, std::min(e, space_.element_count() - 1));
  const double local = (t - space_.node(e)) / h;
  return coeffs_[e] * (1.0 - local) + coeffs_[e + 1] * local;
}

Eigen::MatrixXd mass_matrix(const FemSpace& space) {
  const int m = space.node_count();
  const double h = space.mesh_size();
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    const bool boundary = (j == 0 || j == m - 1);
    mass(j, j) = boundary ? h / 3.0 : 2.0 * h / 3.0;
    if (j + 1 < m) {
      mass(j, j + 1) = h / 6.0;
      mass(j + 1, j) = h / 6.0;
    }
  }
  return mass;
}

FemFunction interpolate(const FemSpace& space, const std::function<double(double)>& f) {
  if (!f) throw std::invalid_argument("interpolate: empty function");
  Eigen::VectorXd coeffs(space.node_count());
  for (int j = 0; j < space.node_count(); ++j) {
    const double v = f(space.node(j));
    if (!std::isfinite(v))
      throw std::runtime_error("interpolate: function returned a non-finite value at a node");
    coeffs[j] = v;
  }
  return FemFunction(space, std::move(coeffs));
}

double l2_norm(const FemFunction& u) {
  const Eigen::MatrixXd mass = mass_matrix(u.space());
  const double sq = u.coeffs().dot(mass * u.coeffs());
  return std::sqrt(std::max(sq, 0.0));
}

}  // namespace fredholm
