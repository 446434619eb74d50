#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "typlab/kicked_ising.hpp"
#include "typlab/types.hpp"

namespace typlab {

/// Eigenvalues at or below this are treated as zero when inverting Lambda.
inline constexpr double kSingularEigenvalue = 1e-14;

/// Statistical operator rho = V diag(p) V^dagger.
///
/// `basis()` is empty when rho is diagonal in the computational basis (the
/// magnetization case); otherwise it holds the unitary V column-wise.
class DensityOperator {
 public:
  /// Validates p_i >= 0 and sum p_i = 1 within 1e-12.
  explicit DensityOperator(RealVec spectrum, std::optional<Mat> basis = std::nullopt);

  static DensityOperator fully_mixed(Index dim);

  Index dim() const noexcept { return spectrum_.size(); }
  const RealVec& spectrum() const noexcept { return spectrum_; }
  bool is_diagonal() const noexcept { return !basis_.has_value(); }
  const std::optional<Mat>& basis() const noexcept { return basis_; }

  double min_eigenvalue() const { return spectrum_.minCoeff(); }
  double max_eigenvalue() const { return spectrum_.maxCoeff(); }

  Mat dense() const;

 private:
  RealVec spectrum_;
  std::optional<Mat> basis_;
};

double purity(const DensityOperator& rho);
double effective_dimension(const DensityOperator& rho);

/// rho(m, M) together with the Lagrange parameter that produced it.
struct ReimannSolution {
  DensityOperator rho;
  double y = 0.0;
  int iterations = 0;
};

/// Solve for rho = (1/N) (1 + y (m - M))^-1 with Tr rho = 1 and Tr M rho = m.
///
/// `levels` are the distinct eigenvalues of a diagonal observable with their
/// multiplicities; `diagonal` is the full diagonal used to expand the result.
/// Throws OutOfRange unless E_min < m < E_max.
ReimannSolution solve_reimann_rho(std::span<const std::pair<double, double>> levels,
                                  const RealVec& diagonal, double m);
ReimannSolution solve_reimann_rho(const MagnetizationObservable& obs, double m);

/// Lambda = sqrt(N rho), held by its eigenvalues sqrt(N p_i) in rho's basis.
class Deformation {
 public:
  explicit Deformation(DensityOperator source);

  const DensityOperator& source() const noexcept { return source_; }
  Index dim() const noexcept { return source_.dim(); }
  const RealVec& scale() const noexcept { return scale_; }
  bool invertible() const noexcept;

  Vec apply(const Vec& v) const;          // Lambda v
  Vec apply_inverse(const Vec& v) const;  // Lambda^-1 v, throws SingularDeformation
  Vec apply_squared(const Vec& v) const;  // Lambda^2 v = N rho v

  Mat dense() const;
  Mat dense_squared() const;

 private:
  Vec apply_scaled(const Vec& v, const RealVec& factors) const;

  DensityOperator source_;
  RealVec scale_;
};

Deformation deformation_from(const DensityOperator& rho);

/// N Tr(rho rho') = N sum_ij p_i p'_j |<i|j'>|^2, the mean of <chi|L' L^2 L'|chi>.
double scaled_overlap(const DensityOperator& rho, const DensityOperator& rho_prime);

/// Bounds N^2 p_min p'_min and N^2 p_max p'_max on `scaled_overlap`.
std::pair<double, double> scaled_overlap_bounds(const DensityOperator& rho,
                                                const DensityOperator& rho_prime);

}  // namespace typlab
