#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fredholm/problems.hpp"
#include "fredholm/spectral.hpp"
#include "oracles.hpp"

using namespace fredholm;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("midpoint collocation matrix") {
  SUBCASE("tiny grid against hand-computed entries") {
    const Eigen::MatrixXd A = quadrature_operator_matrix(Kernel::exponential(), 2);
    REQUIRE(A.rows() == 2);
    // midpoints 0.25 and 0.75, cell width 0.5
    CHECK(A(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(A(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(A(0, 1) == doctest::Approx(0.5 * std::exp(-0.5)).epsilon(1e-15));
    CHECK(A(1, 0) == A(0, 1));
  }

  SUBCASE("symmetry is exact for the built-in kernels") {
    for (const Kernel& kernel : {Kernel::green(), Kernel::exponential()}) {
      const Eigen::MatrixXd A = quadrature_operator_matrix(kernel, 57);
      CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("leading eigenvalue converges to 1/pi^2") {
    const Eigen::VectorXd ev = spectrum(quadrature_operator_matrix(Kernel::green(), 200));
    CHECK(ev[0] == doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-4));
  }

  CHECK_THROWS_AS(quadrature_operator_matrix(Kernel::green(), 1), std::invalid_argument);
}

TEST_CASE("symmetric eigenvalue extraction") {
  CHECK(spectrum(Eigen::MatrixXd::Identity(4, 4)).isApproxToConstant(1.0, 1e-14));

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 3);
  D(0, 0) = 3.0;
  D(1, 1) = 1.0;
  D(2, 2) = 2.0;
  const Eigen::VectorXd ev = spectrum(D);
  CHECK(ev[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ev[2] == doctest::Approx(1.0).epsilon(1e-14));

  // magnitude ordering keeps a dominant negative eigenvalue in front
  D(1, 1) = -5.0;
  const Eigen::VectorXd ev2 = spectrum(D);
  CHECK(ev2[0] == doctest::Approx(-5.0).epsilon(1e-14));

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(spectrum(asym), std::invalid_argument);
  CHECK_THROWS_AS(spectrum(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("discretized green spectrum matches the sine eigensystem") {
  const Eigen::VectorXd ev = spectrum(quadrature_operator_matrix(Kernel::green(), 400));
  for (int j = 1; j <= 20; ++j) {
    const double exact = 1.0 / (j * kPi * j * kPi);
    CHECK(ev[j - 1] == doctest::Approx(exact).epsilon(0.01));
  }

  // eigenvalues are grid-converged: halving N moves the first ten by < 0.5%
  const Eigen::VectorXd coarse = spectrum(quadrature_operator_matrix(Kernel::green(), 200));
  for (int j = 0; j < 10; ++j)
    CHECK(std::abs(coarse[j] - ev[j]) / ev[j] < 5e-3);
}

TEST_CASE("log-log decay fit") {
  SUBCASE("exact power law is recovered exactly") {
    Eigen::VectorXd vals(30);
    for (int j = 1; j <= 30; ++j) vals[j - 1] = std::pow(j, -2.0);
    const DecayFit fit = fit_decay(vals, 1, 30);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(fit.residual_rms < 1e-12);
    CHECK(fit.j0 == 1);
    CHECK(fit.j1 == 30);
  }

  SUBCASE("green kernel decays like j^-2") {
    const Eigen::VectorXd ev = spectrum(quadrature_operator_matrix(Kernel::green(), 400));
    const DecayFit fit = fit_decay(ev, 6, 100);
    CHECK(std::abs(fit.slope + 2.0) < 0.05);
    CHECK(fit.slope <= -2.0 + 0.15);
  }

  SUBCASE("exponential kernel decays like j^-2 as well") {
    const Eigen::VectorXd ev = spectrum(quadrature_operator_matrix(Kernel::exponential(), 800));
    const DecayFit fit = fit_decay(ev, 6, 400);
    CHECK(std::abs(fit.slope + 2.0) < 0.1);
    CHECK(fit.slope <= -2.0 + 0.15);
  }

  SUBCASE("window validation") {
    Eigen::VectorXd vals(10);
    for (int j = 1; j <= 10; ++j) vals[j - 1] = 1.0 / j;
    CHECK_THROWS_AS(fit_decay(vals, 0, 5), std::invalid_argument);
    CHECK_THROWS_AS(fit_decay(vals, 5, 4), std::invalid_argument);
    CHECK_THROWS_AS(fit_decay(vals, 3, 11), std::invalid_argument);
    vals[4] = -1.0;
    CHECK_THROWS_AS(fit_decay(vals, 1, 10), std::domain_error);
  }
}

TEST_CASE("sine projection matrix matches closed-form integrals") {
  const FemSpace space(0.0, 1.0, 23);
  const int J = 40;
  const SineProjection proj(space, J);
  REQUIRE(proj.modes() == J);
  const double h = space.mesh_size();

  for (int j = 1; j <= J; ++j) {
    const double omega = j * kPi;
    for (int node = 0; node < space.node_count(); ++node) {
      const double exact =
          std::sqrt(2.0) * oracle::hat_sine_integral(0.0, h, space.node_count(), node, omega);
      CHECK(proj.matrix()(j - 1, node) == doctest::Approx(exact).scale(1.0).epsilon(1e-12));
    }
  }

  // coefficients() is the matrix product
  std::mt19937_64 rng(64);
  std::normal_distribution<double> normal;
  Eigen::VectorXd c(space.node_count());
  for (int i = 0; i < c.size(); ++i) c[i] = normal(rng);
  const Eigen::VectorXd byhand = proj.matrix() * c;
  const Eigen::VectorXd got = proj.coefficients(c);
  CHECK((got - byhand).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(proj.coefficients(Eigen::VectorXd::Zero(22)), std::invalid_argument);

  const Eigen::VectorXd viafun = sine_coefficients(FemFunction(space, c), J);
  CHECK((viafun - byhand).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("sine basis is orthonormal") {
  // direct quadrature of the continuous basis, no FEM involved
  for (int j = 1; j <= 50; j += 7) {
    for (int k = j; k <= 50; k += 7) {
      const auto f = [&](double t) {
        return 2.0 * std::sin(j * kPi * t) * std::sin(k * kPi * t);
      };
      const double val = oracle::integrate(f, 0.0, 1.0, 2000);
      const double expected = j == k ? 1.0 : 0.0;
      CHECK(std::abs(val - expected) <= 1e-8);
    }
  }
}

TEST_CASE("analytic spectral system") {
  const SpectralSystem sys = SpectralSystem::analytic_green(64);
  CHECK(sys.basis == SpectralSystem::Basis::analytic_sine);
  REQUIRE(sys.singular_values.size() == 64);
  CHECK(sys.truncation == 64);
  for (int j = 1; j <= 64; ++j)
    CHECK(sys.singular_values[j - 1] == doctest::Approx(1.0 / (j * kPi * j * kPi)).epsilon(1e-14));
  for (int j = 1; j < 64; ++j)
    CHECK(sys.singular_values[j] < sys.singular_values[j - 1]);
  CHECK_THROWS_AS(SpectralSystem::analytic_green(0), std::invalid_argument);
}

TEST_CASE("dual-space norm") {
  const FemSpace space(0.0, 1.0, 51);
  const SpectralSystem sys = SpectralSystem::analytic_green(64);

  CHECK(wstar_norm(FemFunction(space, Eigen::VectorXd::Zero(51)), sys) == 0.0);

  // the first basis function itself has (u, phi_1) = 1, so its dual norm is
  // exactly s_1^{1/2} = 1/pi; the interpolant misses by O(h^2)
  const FemFunction s1 =
      interpolate(space, [](double t) { return std::sqrt(2.0) * std::sin(kPi * t); });
  CHECK(wstar_norm(s1, sys) == doctest::Approx(1.0 / kPi).epsilon(2e-3));

  // truncation is effectively converged at the default
  const FemFunction rough = interpolate(space, [](double t) { return t < 0.3 ? 1.0 : -0.5; });
  const double w50 = wstar_norm(rough, SpectralSystem::analytic_green(50));
  const double w100 = wstar_norm(rough, SpectralSystem::analytic_green(100));
  CHECK(std::abs(w100 - w50) / w100 < 1e-4);

  // exact degree-1 homogeneity under power-of-two scaling
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal;
  Eigen::VectorXd c(51);
  for (int i = 0; i < 51; ++i) c[i] = normal(rng);
  const double base = wstar_norm(FemFunction(space, c), sys);
  CHECK(wstar_norm(FemFunction(space, Eigen::VectorXd(2.0 * c)), sys) == 2.0 * base);

  // rejects a discrete-basis system and a mismatched domain
  const SpectralSystem disc = SpectralSystem::discrete(
      Eigen::VectorXd::Ones(3), Eigen::MatrixXd::Identity(3, 3), 3);
  CHECK_THROWS_AS(wstar_norm(FemFunction(space, c), disc), std::invalid_argument);
  const FemSpace shifted(0.0, 2.0, 51);
  CHECK_THROWS_AS(wstar_norm(FemFunction(shifted, c), sys), std::invalid_argument);
}

TEST_CASE("dual norm interpolates between image seminorm and L2 norm") {
  // for any u in the span of the first J modes,
  // ||u||_*^2 = sum s_j u_j^2 <= (sum s_j^2 u_j^2)^{1/2} (sum u_j^2)^{1/2}
  // by Cauchy-Schwarz, i.e. ||u||_*^2 <= ||K u|| ||u||; check the FEM
  // realization of the benchmark truth through high spectral truncation
  const Problem p = polynomial_problem(51);
  const FemFunction ix = interpolate(p.space, p.xdag);
  const int J = 400;
  const Eigen::VectorXd uj = sine_coefficients(ix, J);

  double wstar_sq = 0.0, image_sq = 0.0, l2_sq = 0.0;
  for (int j = 1; j <= J; ++j) {
    const double sj = 1.0 / (j * kPi * j * kPi);
    wstar_sq += sj * uj[j - 1] * uj[j - 1];
    image_sq += sj * sj * uj[j - 1] * uj[j - 1];
    l2_sq += uj[j - 1] * uj[j - 1];
  }
  CHECK(wstar_sq <= std::sqrt(image_sq) * std::sqrt(l2_sq) + 1e-6);

  // the truncated sums agree with the library's norms
  const double via_lib = wstar_norm(ix, SpectralSystem::analytic_green(J));
  CHECK(via_lib == doctest::Approx(std::sqrt(wstar_sq)).epsilon(1e-12));
  CHECK(std::sqrt(l2_sq) == doctest::Approx(l2_norm(ix)).epsilon(1e-3));
}
