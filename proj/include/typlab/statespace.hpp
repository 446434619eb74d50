#pragma once

#include "typlab/ensembles.hpp"
#include "typlab/linear_operator.hpp"
#include "typlab/rng.hpp"
#include "typlab/types.hpp"

namespace typlab {

/// Unit vector in C^N, N >= 2.
class PureState {
 public:
  /// Throws InvalidDimension for N < 2 and DomainError unless the norm is 1
  /// within 1e-12.
  explicit PureState(Vec amplitudes);

  /// Normalize an arbitrary nonzero vector.
  static PureState normalized(const Vec& v);
  static PureState basis_state(Index dim, Index k);

  Index dim() const noexcept { return amplitudes_.size(); }
  const Vec& amplitudes() const noexcept { return amplitudes_; }
  /// <this|other>
  cplx overlap(const PureState& other) const;

 private:
  Vec amplitudes_;
};

/// Preset overlap z = <chi|psi>, |z| <= 1. Only |z| enters the averages.
class OverlapSpec {
 public:
  static OverlapSpec from_z(cplx z);
  /// z = cos(theta), theta in [0, pi/2].
  static OverlapSpec from_theta(double theta);

  cplx z() const noexcept { return z_; }
  double abs_z() const noexcept { return std::abs(z_); }
  double theta() const;
  /// sqrt(1 - |z|^2)
  double complement_weight() const;

 private:
  explicit OverlapSpec(cplx z) : z_(z) {}
  cplx z_;
};

/// Haar-uniform state: i.i.d. complex Gaussians, normalized.
PureState sample_haar(Index dim, RandomStream& rng);

/// Uniform unit vector in the complement of chi, built from a Haar xi by
/// projecting out chi. Resamples xi when it is (numerically) collinear with
/// chi; throws DegenerateSampling after 100 attempts.
PureState orthogonal_complement_sample(const PureState& chi, RandomStream& rng);

/// psi = z chi + sqrt(1 - |z|^2) chi_perp, so <chi|psi> = z.
PureState fixed_overlap_state(const PureState& chi, const OverlapSpec& spec, RandomStream& rng);

/// psi = z L chi/|L chi| + sqrt(1 - |z|^2) L^-1 chi_perp/|L^-1 chi_perp|.
///
/// The two branches are orthogonal because <L chi|L^-1 chi_perp> = 0, and
/// <chi|L|psi>/sqrt(<chi|L^2|chi>) = z. Note that the second branch is not
/// uniform on the complement of L chi unless L is proportional to one.
PureState deformed_fixed_overlap_state(const PureState& chi, const Deformation& lambda,
                                       const OverlapSpec& spec, RandomStream& rng);

/// |<chi|A|psi>|^2
double transition_probability(const PureState& chi, const LinearOperator& op,
                              const PureState& psi);

}  // namespace typlab
