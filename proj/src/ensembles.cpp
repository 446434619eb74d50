#include "typlab/ensembles.hpp"

#include <cmath>
#include <string>

#include "typlab/errors.hpp"

namespace typlab {

DensityOperator::DensityOperator(RealVec spectrum, std::optional<Mat> basis)
    : spectrum_(std::move(spectrum)), basis_(std::move(basis)) {
  if (spectrum_.size() < 1) throw InvalidDimension("DensityOperator: empty spectrum");
  if (basis_ && (basis_->rows() != dim() || basis_->cols() != dim())) {
    throw DimensionMismatch("DensityOperator: basis does not match spectrum length");
  }
  if (basis_ && !(basis_->adjoint() * *basis_).isIdentity(kInverseTol)) {
    throw DomainError("DensityOperator: basis is not unitary");
  }
  if (spectrum_.minCoeff() < 0.0) {
    throw DomainError("DensityOperator: negative eigenvalue");
  }
  if (std::abs(spectrum_.sum() - 1.0) > kExactTol) {
    throw DomainError("DensityOperator: eigenvalues do not sum to one");
  }
}

DensityOperator DensityOperator::fully_mixed(Index dim) {
  if (dim < 1) throw InvalidDimension("DensityOperator::fully_mixed: dimension must be positive");
  return DensityOperator(RealVec::Constant(dim, 1.0 / static_cast<double>(dim)));
}

Mat DensityOperator::dense() const {
  const Vec p = spectrum_.cast<cplx>();
  if (!basis_) return p.asDiagonal();
  return (*basis_) * p.asDiagonal() * basis_->adjoint();
}

double purity(const DensityOperator& rho) { return rho.spectrum().squaredNorm(); }

double effective_dimension(const DensityOperator& rho) { return 1.0 / purity(rho); }

namespace {

// h(y) = Tr[(m - M) rho(y)]; strictly decreasing on the positivity bracket.
// Its root also fixes Tr rho = 1, because Tr rho(y) = 1 - y h(y).
long double moment_residual(std::span<const std::pair<double, double>> levels, double dim,
                            double m, long double y) {
  long double acc = 0.0L;
  for (const auto& [value, mult] : levels) {
    const long double d = static_cast<long double>(m) - value;
    acc += mult * d / (1.0L + y * d);
  }
  return acc / dim;
}

}  // namespace

ReimannSolution solve_reimann_rho(std::span<const std::pair<double, double>> levels,
                                  const RealVec& diagonal, double m) {
  if (levels.empty()) throw InvalidDimension("solve_reimann_rho: empty spectrum");
  double total = 0.0;
  double e_min = levels.front().first;
  double e_max = levels.front().first;
  for (const auto& [value, mult] : levels) {
    total += mult;
    e_min = std::min(e_min, value);
    e_max = std::max(e_max, value);
  }
  const double dim = static_cast<double>(diagonal.size());
  if (std::abs(total - dim) > 0.5) {
    throw DimensionMismatch("solve_reimann_rho: multiplicities do not add up to the dimension");
  }
  if (!(m > e_min && m < e_max)) {
    throw OutOfRange("solve_reimann_rho: m = " + std::to_string(m) +
                     " is outside the open spectral range (" + std::to_string(e_min) + ", " +
                     std::to_string(e_max) + ")");
  }

  long double lo = -1.0L / (static_cast<long double>(m) - e_min);
  long double hi = 1.0L / (static_cast<long double>(e_max) - m);
  const long double span = hi - lo;
  constexpr int kMaxIterations = 200;
  long double y = 0.0L;
  int iter = 0;
  bool converged = false;
  for (; iter < kMaxIterations; ++iter) {
    y = lo + (hi - lo) / 2;
    if (y <= lo || y >= hi) {
      converged = true;
      break;
    }
    const long double h = moment_residual(levels, dim, m, y);
    if (std::abs(h) < 1e-13L || (hi - lo) < 1e-15L * span) {
      converged = true;
      break;
    }
    (h > 0 ? lo : hi) = y;
  }
  if (!converged) {
    throw NumericError("solve_reimann_rho: bisection did not converge in 200 iterations");
  }

  RealVec p(diagonal.size());
  long double norm = 0.0L;
  for (Index s = 0; s < diagonal.size(); ++s) {
    const long double value = 1.0L / (dim * (1.0L + y * (m - diagonal[s])));
    if (!(value > 0.0L)) {
      throw NumericError("solve_reimann_rho: lost positivity at the root");
    }
    p[s] = static_cast<double>(value);
    norm += value;
  }
  p /= static_cast<double>(norm);
  const double mean = p.dot(diagonal);
  if (std::abs(mean - m) > kInverseTol) {
    throw NumericError("solve_reimann_rho: Tr M rho misses m by " + std::to_string(mean - m));
  }
  return {DensityOperator(std::move(p)), static_cast<double>(y), iter};
}

ReimannSolution solve_reimann_rho(const MagnetizationObservable& obs, double m) {
  const auto levels = obs.spectrum_with_multiplicity();
  return solve_reimann_rho(levels, obs.diagonal(), m);
}

Deformation::Deformation(DensityOperator source)
    : source_(std::move(source)),
      scale_((source_.spectrum() * static_cast<double>(source_.dim())).cwiseSqrt()) {}

bool Deformation::invertible() const noexcept {
  return source_.min_eigenvalue() > kSingularEigenvalue;
}

Vec Deformation::apply_scaled(const Vec& v, const RealVec& factors) const {
  require_same_dim(v.size(), dim(), "Deformation");
  const Vec f = factors.cast<cplx>();
  if (source_.is_diagonal()) return f.cwiseProduct(v);
  const Mat& basis = *source_.basis();
  return basis * f.cwiseProduct(basis.adjoint() * v);
}

Vec Deformation::apply(const Vec& v) const { return apply_scaled(v, scale_); }

Vec Deformation::apply_inverse(const Vec& v) const {
  if (!invertible()) {
    throw SingularDeformation("Deformation: Lambda is not invertible (p_min = " +
                              std::to_string(source_.min_eigenvalue()) + ")");
  }
  return apply_scaled(v, scale_.cwiseInverse());
}

Vec Deformation::apply_squared(const Vec& v) const {
  return apply_scaled(v, scale_.cwiseAbs2());
}

Mat Deformation::dense() const {
  const Vec f = scale_.cast<cplx>();
  if (source_.is_diagonal()) return f.asDiagonal();
  const Mat& basis = *source_.basis();
  return basis * f.asDiagonal() * basis.adjoint();
}

Mat Deformation::dense_squared() const {
  const Vec f = scale_.cwiseAbs2().cast<cplx>();
  if (source_.is_diagonal()) return f.asDiagonal();
  const Mat& basis = *source_.basis();
  return basis * f.asDiagonal() * basis.adjoint();
}

Deformation deformation_from(const DensityOperator& rho) { return Deformation(rho); }

double scaled_overlap(const DensityOperator& rho, const DensityOperator& rho_prime) {
  require_same_dim(rho.dim(), rho_prime.dim(), "scaled_overlap");
  const double n = static_cast<double>(rho.dim());
  const RealVec& p = rho.spectrum();
  const RealVec& q = rho_prime.spectrum();
  if (rho.is_diagonal() && rho_prime.is_diagonal()) return n * p.dot(q);
  Mat overlap;
  if (rho.is_diagonal()) {
    overlap = *rho_prime.basis();
  } else if (rho_prime.is_diagonal()) {
    overlap = rho.basis()->adjoint();
  } else {
    overlap = rho.basis()->adjoint() * (*rho_prime.basis());
  }
  const Eigen::MatrixXd weights = overlap.cwiseAbs2();
  return n * p.dot(weights * q);
}

std::pair<double, double> scaled_overlap_bounds(const DensityOperator& rho,
                                                const DensityOperator& rho_prime) {
  const double n = static_cast<double>(rho.dim());
  return {n * n * rho.min_eigenvalue() * rho_prime.min_eigenvalue(),
          n * n * rho.max_eigenvalue() * rho_prime.max_eigenvalue()};
}

}  // namespace typlab
