#pragma once

#include <functional>
#include <string>

#include "typlab/types.hpp"

namespace typlab {

/// Type-erased square linear map on C^N together with its adjoint.
///
/// Both the structured Floquet operator and plain dense matrices are handed
/// around through this type; copies share the underlying callables.
class LinearOperator {
 public:
  using ApplyFn = std::function<Vec(const Vec&)>;

  LinearOperator(Index dim, ApplyFn apply, ApplyFn apply_adjoint);

  static LinearOperator identity(Index dim);
  static LinearOperator zero(Index dim);
  static LinearOperator dense(Mat matrix);
  static LinearOperator diagonal(Vec diag);

  Index dim() const noexcept { return dim_; }

  /// A v. Throws DimensionMismatch when v.size() != dim().
  Vec apply(const Vec& v) const;
  /// A^dagger v.
  Vec apply_adjoint(const Vec& v) const;

  /// Dense N x N realization built column by column.
  Mat to_dense() const;

 private:
  void check(const Vec& v) const;

  Index dim_;
  ApplyFn apply_;
  ApplyFn apply_adjoint_;
};

void require_same_dim(Index a, Index b, const std::string& what);

}  // namespace typlab
