#include "fredholm/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace fredholm {

namespace {

FemSpace unit_space(int nodes) {
  if (nodes < 2) throw std::invalid_argument("Problem: need at least 2 nodes");
  return FemSpace(0.0, 1.0, nodes);
}

}  // namespace

Problem polynomial_problem(int nodes) {
  Problem p{
      "polynomial",
      Kernel::green(),
      unit_space(nodes),
      [](double t) { return -6.0 * t * t * (1.0 - t) * (2.0 + t * (-8.0 + 7.0 * t)); },
      [](double s) {
        const double u = 1.0 - s;
        return s * s * s * s * u * u * u;
      },
      std::sqrt(8.0 / 385.0),
  };
  return p;
}

Problem step_problem(int nodes) {
  Problem p{
      "step",
      Kernel::green(),
      unit_space(nodes),
      [](double t) { return t > 0.5 ? 1.0 : 0.0; },
      [](double s) {
        if (s <= 0.5) return s / 8.0;
        return (1.0 - s) * (4.0 * s - 1.0) / 8.0;
      },
      std::sqrt(0.5),
  };
  return p;
}

Problem zero_problem(int nodes) {
  Problem p{
      "zero",
      Kernel::green(),
      unit_space(nodes),
      [](double) { return 0.0; },
      [](double) { return 0.0; },
      0.0,
  };
  return p;
}

}  // namespace fredholm
