#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "typlab/linear_operator.hpp"
#include "typlab/types.hpp"

namespace typlab {

/// Default cap on the number of spins (N = 4096).
inline constexpr int kDefaultMaxSpins = 12;

/// Kicked Ising ring: Ising coupling J, longitudinal field h, transverse kick b.
struct KicParams {
  int n = 8;
  double J = 0.0;
  double h = 0.0;
  double b = 0.0;

  Index dim() const { return Index{1} << n; }
};

/// One-period propagator U = U_I U_K of the kicked Ising ring.
///
/// Stored structurally: U_I is the diagonal `diag_phases()`, U_K is a product
/// of n commuting single-site rotations exp(-i b sigma^x). Basis index s holds
/// spin i in bit i, with bit value 0 meaning sigma^z = +1.
/// Immutable after construction; copies share the lazily built dense matrix.
class FloquetOperator {
 public:
  const KicParams& params() const noexcept { return params_; }
  Index dim() const noexcept { return diag_phases_.size(); }
  const Vec& diag_phases() const noexcept { return diag_phases_; }
  double kick_angle() const noexcept { return params_.b; }

  /// U v in O(n N): n pair rotations followed by the diagonal phases.
  Vec apply(const Vec& v) const;
  /// U^dagger v = U_K^dagger U_I^dagger v.
  Vec apply_adjoint(const Vec& v) const;
  void apply_in_place(Vec& v) const;
  void apply_adjoint_in_place(Vec& v) const;

  /// Dense matrix, built on first use (thread-safe).
  const Mat& dense() const;

  LinearOperator as_operator() const;

 private:
  friend FloquetOperator build_floquet(const KicParams&, int);

  struct DenseCache;

  FloquetOperator() = default;
  void rotate_all(Vec& v, double angle) const;

  KicParams params_;
  Vec diag_phases_;
  std::shared_ptr<DenseCache> cache_;
};

/// Throws InvalidDimension for n < 1 and ResourceLimit for n > max_spins.
FloquetOperator build_floquet(const KicParams& params, int max_spins = kDefaultMaxSpins);

/// Tr U^T, summed column by column through the structured apply.
cplx trace_power(const FloquetOperator& u, int T, unsigned workers = 1);

/// K(T) = |Tr U^T|^2 / N; K(0) = N.
double form_factor(const FloquetOperator& u, int T, unsigned workers = 1);

/// M_z = sum_i sigma_i^z, diagonal in the computational basis.
struct MagnetizationObservable {
  int n = 0;
  std::vector<int> eigenvalues;

  Index dim() const { return static_cast<Index>(eigenvalues.size()); }
  /// Distinct eigenvalues n - 2k with multiplicity C(n, k), descending.
  std::vector<std::pair<double, double>> spectrum_with_multiplicity() const;
  RealVec diagonal() const;
};

MagnetizationObservable build_magnetization(int n);

/// sigma^z value (+1 or -1) of spin `site` in basis state s.
inline int spin_z(std::uint64_t s, int site) noexcept {
  return ((s >> site) & 1u) ? -1 : 1;
}

}  // namespace typlab
