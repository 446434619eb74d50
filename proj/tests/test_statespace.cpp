#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "test_support.hpp"
#include "typlab/errors.hpp"
#include "typlab/statespace.hpp"

using namespace typlab;

TEST_CASE("pure states validate dimension and norm") {
  CHECK_THROWS_AS(PureState(Vec::Ones(1)), InvalidDimension);
  CHECK_THROWS_AS(PureState(Vec::Ones(4)), DomainError);
  CHECK_NOTHROW(PureState(Vec::Ones(4) / 2.0));
  CHECK_THROWS_AS(PureState::normalized(Vec::Zero(3)), DomainError);
  CHECK_THROWS_AS(PureState::basis_state(4, 4), DomainError);
  const PureState e2 = PureState::basis_state(4, 2);
  CHECK(e2.amplitudes()[2] == cplx(1.0));
  CHECK_THROWS_AS(e2.overlap(PureState::basis_state(8, 0)), DimensionMismatch);
}

TEST_CASE("overlap spec maps theta to a real z") {
  CHECK(OverlapSpec::from_theta(0.0).abs_z() == 1.0);
  CHECK(OverlapSpec::from_theta(support::kPi / 3).abs_z() == doctest::Approx(0.5));
  CHECK(OverlapSpec::from_theta(support::kPi / 2).abs_z() < 1e-15);
  CHECK(OverlapSpec::from_z(cplx(0.6, 0.8)).complement_weight() == doctest::Approx(0.0));
  CHECK(OverlapSpec::from_z(0.6).theta() == doctest::Approx(std::acos(0.6)));
  CHECK_THROWS_AS(OverlapSpec::from_z(cplx(0.8, 0.8)), DomainError);
  CHECK_THROWS_AS(OverlapSpec::from_theta(-0.1), DomainError);
  CHECK_THROWS_AS(OverlapSpec::from_theta(2.0), DomainError);
}

TEST_CASE("Haar states are normalized and reproducible") {
  RandomStream a(1, 0), b(1, 0);
  const PureState x = sample_haar(64, a);
  const PureState y = sample_haar(64, b);
  CHECK(std::abs(x.amplitudes().squaredNorm() - 1.0) < 1e-12);
  CHECK((x.amplitudes() - y.amplitudes()).norm() == 0.0);
  CHECK_THROWS_AS(sample_haar(1, a), InvalidDimension);
}

TEST_CASE("Haar states have the unitarily invariant second moments") {
  // E|psi_i|^2 = 1/N and E|psi_i|^4 = 2/(N(N+1)) for every component.
  const Index n = 4;
  const int trials = 100000;
  RandomStream rng(77, 0);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(n), m4 = Eigen::VectorXd::Zero(n);
  for (int t = 0; t < trials; ++t) {
    const PureState psi = sample_haar(n, rng);
    for (Index i = 0; i < n; ++i) {
      const double p = std::norm(psi.amplitudes()[i]);
      m2[i] += p;
      m4[i] += p * p;
    }
  }
  for (Index i = 0; i < n; ++i) {
    CHECK(std::abs(m2[i] / trials - 0.25) < 5.0 * std::sqrt(3.0 / 80.0 / trials));
    CHECK(m4[i] / trials == doctest::Approx(0.1).epsilon(0.03));
  }
}

TEST_CASE("orthogonal complement samples are orthogonal to chi") {
  RandomStream rng(3, 1);
  const PureState chi = sample_haar(256, rng);
  for (int k = 0; k < 50; ++k) {
    const PureState perp = orthogonal_complement_sample(chi, rng);
    CHECK(std::abs(chi.overlap(perp)) < 1e-14);
  }
  // chi = e_0 in N = 2 leaves a one-dimensional complement.
  const PureState e0 = PureState::basis_state(2, 0);
  const PureState perp = orthogonal_complement_sample(e0, rng);
  CHECK(std::abs(perp.amplitudes()[1]) == doctest::Approx(1.0));
}

TEST_CASE("fixed-overlap states realize <chi|psi> = z exactly") {
  RandomStream rng(11, 2);
  const PureState chi = sample_haar(128, rng);
  for (const cplx z : {cplx(0.0), cplx(1.0), cplx(0.3, -0.4), cplx(std::cos(0.7))}) {
    const PureState psi = fixed_overlap_state(chi, OverlapSpec::from_z(z), rng);
    CHECK(std::abs(chi.overlap(psi) - z) < 1e-12);
    CHECK(std::abs(psi.amplitudes().squaredNorm() - 1.0) < 1e-12);
  }
}

TEST_CASE("deformed fixed-overlap states follow the inverse-complement construction") {
  RandomStream rng(13, 0);
  const Index n = 16;
  const Deformation lambda(support::random_density(n, rng));
  const PureState chi = sample_haar(n, rng);
  const cplx z = 0.6;
  const PureState psi = deformed_fixed_overlap_state(chi, lambda, OverlapSpec::from_z(z), rng);
  CHECK(std::abs(psi.amplitudes().squaredNorm() - 1.0) < 1e-12);
  const Vec head = lambda.apply(chi.amplitudes());
  // The Lambda chi component carries weight |z|; the rest lies in
  // Lambda^-1 chi_perp, which is orthogonal to Lambda chi.
  CHECK(std::abs(head.dot(psi.amplitudes()) / head.norm() - z) < 1e-12);

  RealVec p = RealVec::Constant(n, 1.0 / (n - 1));
  p[0] = 0.0;
  const Deformation singular{DensityOperator(p)};
  CHECK_THROWS_AS(deformed_fixed_overlap_state(chi, singular, OverlapSpec::from_z(z), rng),
                  SingularDeformation);
}

TEST_CASE("transition probability for the identity equals |z|^2") {
  RandomStream rng(17, 0);
  const PureState chi = sample_haar(32, rng);
  const PureState psi = fixed_overlap_state(chi, OverlapSpec::from_z(cplx(0.3, 0.4)), rng);
  CHECK(transition_probability(chi, LinearOperator::identity(32), psi) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(transition_probability(chi, LinearOperator::identity(16), psi),
                  DimensionMismatch);
}
