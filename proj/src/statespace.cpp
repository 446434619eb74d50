#include "typlab/statespace.hpp"

#include <cmath>
#include <numbers>

#include "typlab/errors.hpp"

namespace typlab {

PureState::PureState(Vec amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 2) throw InvalidDimension("PureState: dimension must be at least 2");
  if (std::abs(amplitudes_.squaredNorm() - 1.0) > kExactTol) {
    throw DomainError("PureState: amplitudes are not normalized");
  }
}

PureState PureState::normalized(const Vec& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("PureState::normalized: vector has zero or non-finite norm");
  }
  return PureState(v / norm);
}

PureState PureState::basis_state(Index dim, Index k) {
  if (k < 0 || k >= dim) throw DomainError("PureState::basis_state: index out of range");
  Vec v = Vec::Zero(dim);
  v[k] = 1.0;
  return PureState(std::move(v));
}

cplx PureState::overlap(const PureState& other) const {
  require_same_dim(dim(), other.dim(), "PureState::overlap");
  return amplitudes_.dot(other.amplitudes_);
}

OverlapSpec OverlapSpec::from_z(cplx z) {
  if (!(std::abs(z) <= 1.0)) throw DomainError("OverlapSpec: |z| must not exceed 1");
  return OverlapSpec(z);
}

OverlapSpec OverlapSpec::from_theta(double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) {
    throw DomainError("OverlapSpec: theta must lie in [0, pi/2]");
  }
  return OverlapSpec(cplx(std::cos(theta), 0.0));
}

double OverlapSpec::theta() const { return std::acos(std::min(1.0, abs_z())); }

double OverlapSpec::complement_weight() const {
  return std::sqrt(std::max(0.0, 1.0 - std::norm(z_)));
}

PureState sample_haar(Index dim, RandomStream& rng) {
  if (dim < 2) throw InvalidDimension("sample_haar: dimension must be at least 2");
  Vec v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = rng.complex_normal();
  return PureState(v / v.norm());
}

PureState orthogonal_complement_sample(const PureState& chi, RandomStream& rng) {
  constexpr int kMaxAttempts = 100;
  const Vec& c = chi.amplitudes();
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const PureState xi = sample_haar(chi.dim(), rng);
    const cplx proj = c.dot(xi.amplitudes());
    const double rest = 1.0 - std::norm(proj);
    if (rest < kExactTol) continue;
    Vec perp = xi.amplitudes() - proj * c;
    // One Gram-Schmidt pass leaves O(eps) overlap; a second pass removes it.
    perp -= c.dot(perp) * c;
    return PureState(perp / perp.norm());
  }
  throw DegenerateSampling("orthogonal_complement_sample: 100 collinear draws in a row");
}

PureState fixed_overlap_state(const PureState& chi, const OverlapSpec& spec, RandomStream& rng) {
  const PureState perp = orthogonal_complement_sample(chi, rng);
  Vec psi = spec.z() * chi.amplitudes() + spec.complement_weight() * perp.amplitudes();
  return PureState(std::move(psi));
}

PureState deformed_fixed_overlap_state(const PureState& chi, const Deformation& lambda,
                                       const OverlapSpec& spec, RandomStream& rng) {
  require_same_dim(chi.dim(), lambda.dim(), "deformed_fixed_overlap_state");
  if (!lambda.invertible()) {
    throw SingularDeformation("deformed_fixed_overlap_state: Lambda has a zero eigenvalue");
  }
  const PureState perp = orthogonal_complement_sample(chi, rng);
  const Vec head = lambda.apply(chi.amplitudes());
  const Vec tail = lambda.apply_inverse(perp.amplitudes());
  const Vec psi = spec.z() * (head / head.norm()) + spec.complement_weight() * (tail / tail.norm());
  // Rounding in L and L^-1 can push the norm off by more than the 1e-12 gate
  // for strongly deformed rho; the branches are orthogonal, so rescale.
  return PureState::normalized(psi);
}

double transition_probability(const PureState& chi, const LinearOperator& op,
                              const PureState& psi) {
  require_same_dim(chi.dim(), op.dim(), "transition_probability");
  require_same_dim(psi.dim(), op.dim(), "transition_probability");
  return std::norm(chi.amplitudes().dot(op.apply(psi.amplitudes())));
}

}  // namespace typlab
