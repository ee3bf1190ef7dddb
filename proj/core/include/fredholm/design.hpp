#pragma once

#include <Eigen/Core>

namespace fredholm {

/// Strictly increasing sample locations inside a fixed interval, together
/// with the measured quasi-uniformity ratio (max gap / min gap). Equispaced
/// designs report a ratio of exactly 1 (last-ulp gap differences are
/// snapped).
class SampleDesign {
 public:
  SampleDesign(Eigen::VectorXd points, double a, double b);

  int size() const { return static_cast<int>(points_.size()); }
  double point(int i) const { return points_[i]; }
  const Eigen::VectorXd& points() const { return points_; }
  double domain_a() const { return a_; }
  double domain_b() const { return b_; }
  double quasi_uniform_bound() const { return ratio_; }

 private:
  Eigen::VectorXd points_;
  double a_;
  double b_;
  double ratio_;
};

/// Point observations w_i = y(s_i) + noise, attached to their design.
class Observation {
 public:
  Observation(SampleDesign design, Eigen::VectorXd w);

  const SampleDesign& design() const { return design_; }
  const Eigen::VectorXd& w() const { return w_; }
  int size() const { return design_.size(); }

 private:
  SampleDesign design_;
  Eigen::VectorXd w_;
};

}  // namespace fredholm
