#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "fredholm/param_select.hpp"
#include "fredholm/problems.hpp"
#include "fredholm/spectral.hpp"
#include "fredholm/stochastic.hpp"
#include "fredholm/tikhonov.hpp"

namespace {

using namespace fredholm;

void BM_OperatorMatrix(benchmark::State& state) {
  const Problem p = polynomial_problem(51);
  const SampleDesign design = make_design(static_cast<int>(state.range(0)), 0.0, 1.0);
  const QuadratureRule quad;
  for (auto _ : state) {
    Eigen::MatrixXd G = operator_matrix(p.kernel, p.space, design, quad);
    benchmark::DoNotOptimize(G.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OperatorMatrix)->Arg(1000)->Arg(4000)->Arg(9000);

void BM_RegularizedSolve(benchmark::State& state) {
  const Problem p = polynomial_problem(51);
  const int n = static_cast<int>(state.range(0));
  const SampleDesign design = make_design(n, 0.0, 1.0);
  const TikhonovSystem system(p.kernel, p.space, design);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = p.data(design.point(i));
  const Eigen::VectorXd w = y + gen_noise(NoiseModel::gaussian(1e-4), n, 7);
  for (auto _ : state) {
    RegularizedSolution sol = system.solve(w, 1e-8);
    benchmark::DoNotOptimize(sol.discrepancy);
  }
}
BENCHMARK(BM_RegularizedSolve)->Arg(1000)->Arg(10000);

void BM_AdaptiveAlpha(benchmark::State& state) {
  const Problem p = polynomial_problem(51);
  const int n = static_cast<int>(state.range(0));
  const SampleDesign design = make_design(n, 0.0, 1.0);
  const TikhonovSystem system(p.kernel, p.space, design);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = p.data(design.point(i));
  const double sigma = NoiseModel::relative(0.001, p.data, design).sigma;
  const Eigen::VectorXd w = y + gen_noise(NoiseModel::gaussian(sigma), n, 11);
  for (auto _ : state) {
    AlphaTrace trace = adaptive_alpha(system, w, 2, {});
    benchmark::DoNotOptimize(trace.alpha_final);
  }
}
BENCHMARK(BM_AdaptiveAlpha)->Arg(9000);

void BM_Spectrum(benchmark::State& state) {
  const Kernel kernel = Kernel::exponential();
  const int N = static_cast<int>(state.range(0));
  const Eigen::MatrixXd A = quadrature_operator_matrix(kernel, N);
  for (auto _ : state) {
    Eigen::VectorXd values = spectrum(A);
    benchmark::DoNotOptimize(values.data());
  }
}
BENCHMARK(BM_Spectrum)->Arg(400)->Arg(1000);

void BM_SineProjection(benchmark::State& state) {
  const FemSpace space(0.0, 1.0, 51);
  const int J = static_cast<int>(state.range(0));
  for (auto _ : state) {
    SineProjection proj(space, J);
    benchmark::DoNotOptimize(proj.matrix().data());
  }
}
BENCHMARK(BM_SineProjection)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
