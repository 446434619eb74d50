#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "test_support.hpp"
#include "typlab/ensembles.hpp"
#include "typlab/errors.hpp"
#include "typlab/kicked_ising.hpp"

using namespace typlab;

TEST_CASE("density operators validate their spectrum") {
  CHECK_THROWS_AS(DensityOperator(RealVec::Constant(4, 0.3)), DomainError);
  RealVec neg(3);
  neg << 0.6, 0.5, -0.1;
  CHECK_THROWS_AS(DensityOperator{neg}, DomainError);
  const DensityOperator mixed = DensityOperator::fully_mixed(16);
  CHECK(purity(mixed) == doctest::Approx(1.0 / 16).epsilon(1e-14));
  CHECK(effective_dimension(mixed) == doctest::Approx(16.0).epsilon(1e-14));
  RealVec pure = RealVec::Zero(4);
  pure[2] = 1.0;
  CHECK(purity(DensityOperator(pure)) == 1.0);
  CHECK_THROWS_AS(DensityOperator(RealVec::Constant(4, 0.25), Mat::Identity(3, 3)),
                  DimensionMismatch);
}

TEST_CASE("rotated density operators expand to V diag(p) V^dagger") {
  RandomStream rng(1, 0);
  const Index n = 8;
  const Mat v = support::haar_unitary(n, rng);
  const DensityOperator diag = support::random_density(n, rng);
  const DensityOperator rot(diag.spectrum(), v);
  const Mat expected = v * diag.spectrum().cast<cplx>().asDiagonal() * v.adjoint();
  CHECK((rot.dense() - expected).cwiseAbs().maxCoeff() < 1e-14);
  const Deformation lambda(rot);
  CHECK((lambda.dense_squared() - double(n) * expected).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((lambda.dense() * lambda.dense() - lambda.dense_squared()).cwiseAbs().maxCoeff() < 1e-13);
  const Vec x = support::random_matrix(n, rng).col(0);
  CHECK((lambda.apply_inverse(lambda.apply(x)) - x).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((lambda.apply_squared(x) - double(n) * expected * x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("a zero eigenvalue makes the deformation singular") {
  RealVec p(4);
  p << 0.5, 0.5, 0.0, 0.0;
  const Deformation lambda{DensityOperator(p)};
  CHECK_FALSE(lambda.invertible());
  CHECK_THROWS_AS(lambda.apply_inverse(Vec::Ones(4)), SingularDeformation);
  CHECK(Deformation(DensityOperator::fully_mixed(4)).invertible());
}

TEST_CASE("rho solve at zero magnetization is the fully mixed state") {
  const ReimannSolution sol = solve_reimann_rho(build_magnetization(8), 0.0);
  CHECK(sol.y == 0.0);
  CHECK(purity(sol.rho) == doctest::Approx(1.0 / 256).epsilon(1e-13));
}

TEST_CASE("rho solve hits the constraints over the open spectral range") {
  const MagnetizationObservable mag = build_magnetization(8);
  const RealVec e = mag.diagonal();
  RandomStream rng(2024, 0);
  for (int k = 0; k < 50; ++k) {
    const double m = -7.99 + 15.98 * rng.uniform();
    CAPTURE(m);
    const ReimannSolution sol = solve_reimann_rho(mag, m);
    const RealVec& p = sol.rho.spectrum();
    CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    CHECK(std::abs(p.dot(e) - m) < 1e-10);
    CHECK(p.minCoeff() > 0.0);
    // Functional form (1/N) / (1 + y (m - E)).
    for (Index i = 0; i < p.size(); i += 17) {
      CHECK(std::abs(256.0 * p[i] * (1.0 + sol.y * (m - e[i])) - 1.0) < 1e-9);
    }
  }
  CHECK_THROWS_AS(solve_reimann_rho(mag, 8.0), OutOfRange);
  CHECK_THROWS_AS(solve_reimann_rho(mag, -8.0), OutOfRange);
  CHECK_THROWS_AS(solve_reimann_rho(mag, 9.5), OutOfRange);
}

TEST_CASE("rho solve for a generic diagonal observable") {
  const std::vector<std::pair<double, double>> levels{{-1.0, 1.0}, {0.0, 2.0}, {2.0, 1.0}};
  RealVec diag(4);
  diag << -1.0, 0.0, 0.0, 2.0;
  for (double m : {-0.9, 0.25, 1.7}) {
    const ReimannSolution sol = solve_reimann_rho(levels, diag, m);
    CHECK(std::abs(sol.rho.spectrum().sum() - 1.0) < 1e-12);
    CHECK(std::abs(sol.rho.spectrum().dot(diag) - m) < 1e-10);
  }
  // m equal to Tr M / N gives y = 0.
  CHECK(std::abs(solve_reimann_rho(levels, diag, 0.25).y) < 1e-12);
}

TEST_CASE("purity bounds and the overlap sandwich hold for magnetization states") {
  const MagnetizationObservable mag = build_magnetization(8);
  const double n = 256.0;
  RandomStream rng(99, 0);
  for (int k = 0; k < 20; ++k) {
    const double m = -7.5 + 15.0 * rng.uniform();
    const double mp = -7.5 + 15.0 * rng.uniform();
    const DensityOperator rho = solve_reimann_rho(mag, m).rho;
    const DensityOperator rho_p = solve_reimann_rho(mag, mp).rho;
    CHECK(purity(rho) >= 1.0 / n - 1e-15);
    CHECK(purity(rho) <= 1.0);
    const double s = scaled_overlap(rho, rho_p);
    const auto [lo, hi] = scaled_overlap_bounds(rho, rho_p);
    CHECK(lo <= s);
    CHECK(s <= hi);
    const double direct = n * rho.spectrum().dot(rho_p.spectrum());
    CHECK(std::abs(s - direct) < 1e-13 * std::max(1.0, direct));
  }
}

TEST_CASE("scaled overlap of rotated states equals N Tr rho rho'") {
  RandomStream rng(5, 5);
  const Index n = 12;
  const DensityOperator a(support::random_density(n, rng).spectrum(), support::haar_unitary(n, rng));
  const DensityOperator b(support::random_density(n, rng).spectrum(), support::haar_unitary(n, rng));
  const double direct = double(n) * (a.dense() * b.dense()).trace().real();
  CHECK(std::abs(scaled_overlap(a, b) - direct) < 1e-13);
  const auto [lo, hi] = scaled_overlap_bounds(a, b);
  CHECK(lo <= direct);
  CHECK(direct <= hi);
}

TEST_CASE("a non-unitary basis is rejected") {
  Mat v = Mat::Identity(3, 3);
  v(0, 1) = 0.5;
  CHECK_THROWS_AS(DensityOperator(RealVec::Constant(3, 1.0 / 3), v), DomainError);
}
