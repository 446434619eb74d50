#include "typlab/linear_operator.hpp"

#include <memory>
#include <utility>

#include "typlab/errors.hpp"

namespace typlab {

void require_same_dim(Index a, Index b, const std::string& what) {
  if (a != b) {
    throw DimensionMismatch(what + ": dimension " + std::to_string(a) +
                            " does not match " + std::to_string(b));
  }
}

LinearOperator::LinearOperator(Index dim, ApplyFn apply, ApplyFn apply_adjoint)
    : dim_(dim), apply_(std::move(apply)), apply_adjoint_(std::move(apply_adjoint)) {
  if (dim_ < 1) throw InvalidDimension("LinearOperator: dimension must be positive");
}

LinearOperator LinearOperator::identity(Index dim) {
  auto id = [](const Vec& v) { return v; };
  return {dim, id, id};
}

LinearOperator LinearOperator::zero(Index dim) {
  auto z = [](const Vec& v) -> Vec { return Vec::Zero(v.size()); };
  return {dim, z, z};
}

LinearOperator LinearOperator::dense(Mat matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw DimensionMismatch("LinearOperator::dense: matrix must be square");
  }
  auto m = std::make_shared<const Mat>(std::move(matrix));
  return {m->rows(), [m](const Vec& v) -> Vec { return (*m) * v; },
          [m](const Vec& v) -> Vec { return m->adjoint() * v; }};
}

LinearOperator LinearOperator::diagonal(Vec diag) {
  auto d = std::make_shared<const Vec>(std::move(diag));
  return {d->size(), [d](const Vec& v) -> Vec { return d->cwiseProduct(v); },
          [d](const Vec& v) -> Vec { return d->conjugate().cwiseProduct(v); }};
}

void LinearOperator::check(const Vec& v) const {
  require_same_dim(v.size(), dim_, "LinearOperator");
}

Vec LinearOperator::apply(const Vec& v) const {
  check(v);
  return apply_(v);
}

Vec LinearOperator::apply_adjoint(const Vec& v) const {
  check(v);
  return apply_adjoint_(v);
}

Mat LinearOperator::to_dense() const {
  Mat out(dim_, dim_);
  Vec e = Vec::Zero(dim_);
  for (Index j = 0; j < dim_; ++j) {
    e[j] = 1.0;
    out.col(j) = apply_(e);
    e[j] = 0.0;
  }
  return out;
}

}  // namespace typlab
