#pragma once

#include <functional>
#include <string>

#include "fredholm/fem.hpp"
#include "fredholm/kernel.hpp"

namespace fredholm {

/// Benchmark instance: kernel, discretization space, ground truth and its
/// exact forward image. `data` is the closed form of y = K xdag; when it is
/// empty, observations must be synthesized through the discretized operator.
struct Problem {
  std::string name;
  Kernel kernel;
  FemSpace space;
  std::function<double(double)> xdag;
  std::function<double(double)> data;
  double xdag_norm = 0;  // exact ||xdag||_{L2}
};

/// Green kernel with the smooth truth xdag(t) = -6 t^2 (1-t)(2 - 8t + 7t^2),
/// whose image is y(s) = s^4 (1-s)^3; ||xdag|| = sqrt(8/385).
Problem polynomial_problem(int nodes = 51);

/// Green kernel with the unit step at t = 1/2 (xdag(t) = 1 for t > 1/2);
/// y is piecewise quadratic with peak 9/128 at s = 5/8; ||xdag|| = sqrt(1/2).
Problem step_problem(int nodes = 51);

/// Zero ground truth, zero data; smoke tests and noise-only diagnostics.
Problem zero_problem(int nodes = 51);

}  // namespace fredholm
