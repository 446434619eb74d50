#include "typlab/kicked_ising.hpp"

#include <bit>
#include <cmath>
#include <mutex>
#include <string>

#include "typlab/errors.hpp"
#include "typlab/parallel.hpp"

namespace typlab {

struct FloquetOperator::DenseCache {
  std::once_flag once;
  Mat matrix;
};

FloquetOperator build_floquet(const KicParams& params, int max_spins) {
  if (params.n < 1) throw InvalidDimension("build_floquet: need at least one spin");
  if (params.n > max_spins) {
    throw ResourceLimit("build_floquet: n = " + std::to_string(params.n) +
                        " exceeds the cap of " + std::to_string(max_spins) + " spins");
  }
  FloquetOperator u;
  u.params_ = params;
  u.cache_ = std::make_shared<FloquetOperator::DenseCache>();
  const int n = params.n;
  const Index dim = params.dim();
  u.diag_phases_.resize(dim);
  for (Index s = 0; s < dim; ++s) {
    const auto bits = static_cast<std::uint64_t>(s);
    double energy = 0.0;
    for (int i = 0; i < n; ++i) {
      const int zi = spin_z(bits, i);
      const int zj = spin_z(bits, (i + 1) % n);
      energy += params.J * zi * zj + params.h * zi;
    }
    u.diag_phases_[s] = std::polar(1.0, -energy);
  }
  return u;
}

// exp(-i angle sigma^x) on every site; sigma^x_i pairs s with s ^ (1 << i).
void FloquetOperator::rotate_all(Vec& v, double angle) const {
  const double c = std::cos(angle);
  const cplx ms(0.0, -std::sin(angle));
  const Index dim = v.size();
  for (int i = 0; i < params_.n; ++i) {
    const Index stride = Index{1} << i;
    for (Index base = 0; base < dim; base += 2 * stride) {
      for (Index k = base; k < base + stride; ++k) {
        const cplx a = v[k];
        const cplx b = v[k + stride];
        v[k] = c * a + ms * b;
        v[k + stride] = ms * a + c * b;
      }
    }
  }
}

void FloquetOperator::apply_in_place(Vec& v) const {
  require_same_dim(v.size(), dim(), "FloquetOperator::apply");
  rotate_all(v, params_.b);
  v.array() *= diag_phases_.array();
}

void FloquetOperator::apply_adjoint_in_place(Vec& v) const {
  require_same_dim(v.size(), dim(), "FloquetOperator::apply_adjoint");
  v.array() *= diag_phases_.array().conjugate();
  rotate_all(v, -params_.b);
}

Vec FloquetOperator::apply(const Vec& v) const {
  Vec out = v;
  apply_in_place(out);
  return out;
}

Vec FloquetOperator::apply_adjoint(const Vec& v) const {
  Vec out = v;
  apply_adjoint_in_place(out);
  return out;
}

const Mat& FloquetOperator::dense() const {
  std::call_once(cache_->once, [this] { cache_->matrix = as_operator().to_dense(); });
  return cache_->matrix;
}

LinearOperator FloquetOperator::as_operator() const {
  const FloquetOperator self = *this;
  return {dim(), [self](const Vec& v) { return self.apply(v); },
          [self](const Vec& v) { return self.apply_adjoint(v); }};
}

cplx trace_power(const FloquetOperator& u, int T, unsigned workers) {
  const Index dim = u.dim();
  if (T < 0) throw DomainError("trace_power: T must be non-negative");
  if (T == 0) return cplx(static_cast<double>(dim), 0.0);
  std::vector<cplx> diag(static_cast<std::size_t>(dim));
  parallel_for(static_cast<std::size_t>(dim), workers, [&](std::size_t s) {
    Vec e = Vec::Zero(dim);
    e[static_cast<Index>(s)] = 1.0;
    for (int t = 0; t < T; ++t) u.apply_in_place(e);
    diag[s] = e[static_cast<Index>(s)];
  });
  cplx total = 0.0;
  for (const cplx& d : diag) total += d;
  return total;
}

double form_factor(const FloquetOperator& u, int T, unsigned workers) {
  return std::norm(trace_power(u, T, workers)) / static_cast<double>(u.dim());
}

MagnetizationObservable build_magnetization(int n) {
  if (n < 1) throw InvalidDimension("build_magnetization: need at least one spin");
  if (n > 30) throw ResourceLimit("build_magnetization: too many spins");
  MagnetizationObservable m;
  m.n = n;
  const std::uint64_t dim = std::uint64_t{1} << n;
  m.eigenvalues.resize(dim);
  for (std::uint64_t s = 0; s < dim; ++s) {
    m.eigenvalues[s] = n - 2 * std::popcount(s);
  }
  return m;
}

std::vector<std::pair<double, double>> MagnetizationObservable::spectrum_with_multiplicity() const {
  std::vector<std::pair<double, double>> out;
  double binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    out.emplace_back(static_cast<double>(n - 2 * k), binom);
    binom = binom * (n - k) / (k + 1);
  }
  return out;
}

RealVec MagnetizationObservable::diagonal() const {
  RealVec d(dim());
  for (Index s = 0; s < dim(); ++s) d[s] = eigenvalues[static_cast<std::size_t>(s)];
  return d;
}

}  // namespace typlab
