#include "fredholm/design.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace fredholm {

namespace {

double gap_ratio(const Eigen::VectorXd& points) {
  if (points.size() < 3) return 1.0;
  double min_gap = std::numeric_limits<double>::infinity();
  double max_gap = 0.0;
  for (Eigen::Index i = 1; i < points.size(); ++i) {
    const double gap = points[i] - points[i - 1];
    min_gap = std::min(min_gap, gap);
    max_gap = std::max(max_gap, gap);
  }
  double ratio = max_gap / min_gap;
  // Rounding the points themselves perturbs each gap by a few ulp of the
  // point magnitude, so gaps closer than that are indistinguishable from a
  // uniform grid; report those as exactly uniform.
  const double scale = std::max(std::abs(points[0]), std::abs(points[points.size() - 1]));
  if (max_gap - min_gap <= 8.0 * std::numeric_limits<double>::epsilon() * scale) ratio = 1.0;
  return ratio;
}

}  // namespace

SampleDesign::SampleDesign(Eigen::VectorXd points, double a, double b)
    : points_(std::move(points)), a_(a), b_(b), ratio_(1.0) {
  if (!(a < b)) throw std::invalid_argument("SampleDesign: domain must satisfy a < b");
  if (points_.size() == 0) throw std::invalid_argument("SampleDesign: empty point set");
  for (Eigen::Index i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i]))
      throw std::invalid_argument("SampleDesign: non-finite sample point");
    if (points_[i] < a_ || points_[i] > b_)
      throw std::invalid_argument("SampleDesign: sample point outside [a, b]");
    if (i > 0 && !(points_[i] > points_[i - 1]))
      throw std::invalid_argument("SampleDesign: points must be strictly increasing");
  }
  ratio_ = gap_ratio(points_);
}

Observation::Observation(SampleDesign design, Eigen::VectorXd w)
    : design_(std::move(design)), w_(std::move(w)) {
  if (w_.size() != design_.size())
    throw std::invalid_argument("Observation: data length does not match design size");
}

}  // namespace fredholm
