#include "typlab/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "typlab/errors.hpp"

namespace typlab {

namespace {

void require_dim(Index dim) {
  if (dim < 2) throw InvalidDimension("closed form: dimension must be at least 2");
}

// |z|^2, validated.
double overlap_weight(cplx z) {
  const double x = std::norm(z);
  if (!(x <= 1.0)) throw DomainError("closed form: |z| must not exceed 1");
  return x;
}

struct Shape {
  double n;
  double x;  // |z|^2
  double t;  // 1 - |z|^2
};

Shape shape(cplx z, Index dim) {
  require_dim(dim);
  const double x = overlap_weight(z);
  return {static_cast<double>(dim), x, 1.0 - x};
}

}  // namespace

LambdaCoefficients lambda_coefficients(cplx z, Index dim) {
  const auto [n, x, t] = shape(z, dim);
  const double a = 2.0 * t * t / (n * (n - 1.0));
  const double b = t * t / ((n - 1.0) * (n - 1.0));
  const double c = 2.0 * t * x / (n - 1.0);
  return {a - b, 2.0 * b + c - 2.0 * a, a - b - c};
}

double clamp_variance(double v) {
  if (v >= 0.0) return v;
  if (v >= -kExactTol) return 0.0;
  std::ostringstream msg;
  msg << "closed-form variance is negative beyond rounding: " << v;
  throw NumericError(msg.str());
}

cplx ha_expectation(cplx trace_m, Index dim) {
  require_dim(dim);
  return trace_m / static_cast<double>(dim);
}

double hv_expectation(cplx trace_m, cplx trace_m2, Index dim) {
  require_dim(dim);
  const double n = static_cast<double>(dim);
  return clamp_variance((trace_m2.real() / n - std::norm(trace_m) / (n * n)) / (n + 1.0));
}

ChiElements chi_elements(const PureState& chi, const LinearOperator& a) {
  require_same_dim(chi.dim(), a.dim(), "chi_elements");
  const Vec w = a.apply_adjoint(chi.amplitudes());
  return {w.squaredNorm(), w.dot(chi.amplitudes())};
}

DeformedChiElements deformed_chi_elements(const Vec& chi, const LinearOperator& a,
                                          const Deformation& lambda) {
  require_same_dim(chi.size(), a.dim(), "deformed_chi_elements");
  require_same_dim(chi.size(), lambda.dim(), "deformed_chi_elements");
  const Vec w = lambda.apply(a.apply_adjoint(chi));
  const Vec lc = lambda.apply(chi);
  return {w.squaredNorm(), w.dot(lc), lc.squaredNorm()};
}

double ha_transition_uniform(const ChiElements& e, Index dim) {
  require_dim(dim);
  return e.aad / static_cast<double>(dim);
}

double ha_transition_uniform(const PureState& chi, const LinearOperator& a) {
  return ha_transition_uniform(chi_elements(chi, a), chi.dim());
}

double ha_transition_both(double trace_aad, Index dim) {
  require_dim(dim);
  const double n = static_cast<double>(dim);
  return trace_aad / (n * n);
}

double ha_transition_deformed(const DensityOperator& rho, const DensityOperator& rho_prime,
                              const Mat& a) {
  require_same_dim(rho.dim(), rho_prime.dim(), "ha_transition_deformed");
  require_same_dim(rho.dim(), a.rows(), "ha_transition_deformed");
  return (rho_prime.dense() * a * rho.dense() * a.adjoint()).trace().real();
}

double hv_transition_uniform(const ChiElements& e, Index dim) {
  require_dim(dim);
  const double n = static_cast<double>(dim);
  return (n - 1.0) / (n * n * (n + 1.0)) * e.aad * e.aad;
}

double hv_transition_uniform(const PureState& chi, const LinearOperator& a) {
  return hv_transition_uniform(chi_elements(chi, a), chi.dim());
}

double hv_transition_both(double trace_aad_squared, double trace_aad, Index dim) {
  require_dim(dim);
  const double n = static_cast<double>(dim);
  return (n - 1.0) / (n * n * n * (n + 1.0) * (n + 1.0)) *
         (trace_aad_squared + trace_aad * trace_aad);
}

double hv_transition_both(const Mat& a) {
  const Mat aad = a * a.adjoint();
  return hv_transition_both((aad * aad).trace().real(), aad.trace().real(), a.rows());
}

double ha_fixed_overlap(const ChiElements& e, cplx z, Index dim) {
  const auto [n, x, t] = shape(z, dim);
  return t / (n - 1.0) * e.aad + (n * x - 1.0) / (n - 1.0) * std::norm(e.a);
}

double ha_fixed_overlap(const PureState& chi, const LinearOperator& a, cplx z) {
  return ha_fixed_overlap(chi_elements(chi, a), z, chi.dim());
}

double second_moment_fixed_overlap(const ChiElements& e, cplx z, Index dim) {
  const auto [n, x, t] = shape(z, dim);
  const double q = 2.0 * t * t / (n * (n - 1.0));
  const double r = 4.0 * t * x / (n - 1.0);
  const double a2 = std::norm(e.a);
  return q * e.aad * e.aad + (q - r + x * x) * a2 * a2 - (2.0 * q - r) * e.aad * a2;
}

double hv_fixed_overlap(const ChiElements& e, cplx z, Index dim) {
  const LambdaCoefficients l = lambda_coefficients(z, dim);
  const double a2 = std::norm(e.a);
  return clamp_variance(l.l1 * e.aad * e.aad + l.l2 * e.aad * a2 + l.l3 * a2 * a2);
}

double hv_fixed_overlap(const PureState& chi, const LinearOperator& a, cplx z) {
  return hv_fixed_overlap(chi_elements(chi, a), z, chi.dim());
}

double ha_fixed_overlap_both(double trace_aad, cplx trace_a, cplx z, Index dim) {
  const auto [n, x, t] = shape(z, dim);
  const double denom = n * n * n - n;
  return (n - x) / denom * trace_aad + (n * x - 1.0) / denom * std::norm(trace_a);
}

double ha_fixed_overlap_both_unitary(double k1, cplx z, Index dim) {
  const auto [n, x, t] = shape(z, dim);
  return ((n - x) + (n * x - 1.0) * k1) / (n * n - 1.0);
}

double overlap_second_moment_unitary(const UnitaryTraces& t) {
  require_dim(t.dim);
  const double n = static_cast<double>(t.dim);
  return (std::norm(t.tr_u) + n) / (n * (n + 1.0));
}

double overlap_fourth_moment_unitary(const UnitaryTraces& t) {
  require_dim(t.dim);
  const double n = static_cast<double>(t.dim);
  const double u2 = std::norm(t.tr_u);
  const cplx conj_u = std::conj(t.tr_u);
  const double cross = 2.0 * (t.tr_u2 * conj_u * conj_u).real();
  const double numer =
      u2 * u2 + cross + std::norm(t.tr_u2) + (4.0 * n + 8.0) * u2 + 2.0 * n * n + 6.0 * n;
  return numer / (n * (n + 1.0) * (n + 2.0) * (n + 3.0));
}

double second_moment_fixed_overlap_both_unitary(const UnitaryTraces& traces, cplx z) {
  const auto [n, x, t] = shape(z, traces.dim);
  const double q = 2.0 * t * t / (n * (n - 1.0));
  const double r = 4.0 * t * x / (n - 1.0);
  return q + (q - r + x * x) * overlap_fourth_moment_unitary(traces) +
         (r - 2.0 * q) * overlap_second_moment_unitary(traces);
}

double hv_fixed_overlap_both_unitary(const UnitaryTraces& traces, cplx z) {
  const double mean = ha_fixed_overlap_both_unitary(traces.form_factor(), z, traces.dim);
  return clamp_variance(second_moment_fixed_overlap_both_unitary(traces, z) - mean * mean);
}

double slope_fixed_overlap_both(double k1, cplx z, Index dim) {
  const auto [n, x, t] = shape(z, dim);
  return 2.0 * std::abs(z) * (n * k1 - 1.0) / (n * n - 1.0);
}

double ha_fixed_overlap_deformed(const DeformedChiElements& e, cplx z, Index dim) {
  const auto [n, x, t] = shape(z, dim);
  return t / (n - 1.0) * e.al2ad + (n * x - 1.0) / (n - 1.0) * std::norm(e.al2) / e.l2;
}

double ha_fixed_overlap_deformed(const PureState& chi, const LinearOperator& a,
                                 const Deformation& lambda, cplx z) {
  return ha_fixed_overlap_deformed(deformed_chi_elements(chi.amplitudes(), a, lambda), z,
                                   chi.dim());
}

double hv_fixed_overlap_deformed(const DeformedChiElements& e, cplx z, Index dim) {
  const LambdaCoefficients l = lambda_coefficients(z, dim);
  const double ratio = std::norm(e.al2) / e.l2;
  return clamp_variance(l.l1 * e.al2ad * e.al2ad + l.l2 * e.al2ad * ratio +
                        l.l3 * ratio * ratio);
}

double hv_fixed_overlap_deformed(const PureState& chi, const LinearOperator& a,
                                 const Deformation& lambda, cplx z) {
  return hv_fixed_overlap_deformed(deformed_chi_elements(chi.amplitudes(), a, lambda), z,
                                   chi.dim());
}

cplx moment_product(std::span<const Mat> ops) {
  constexpr std::size_t kMaxOrder = 6;
  const std::size_t order = ops.size();
  if (order < 1 || order > kMaxOrder) {
    throw UnsupportedOrder("moment_product: order " + std::to_string(order) +
                           " outside the supported range 1..6");
  }
  const Index dim = ops.front().rows();
  for (const Mat& op : ops) {
    if (op.rows() != dim || op.cols() != dim) {
      throw DimensionMismatch("moment_product: operators must be square of equal size");
    }
  }
  require_dim(dim);

  // Trace of the ordered product along one cycle, memoized by the cycle's
  // index sequence (rotated to start at its smallest element).
  std::map<std::vector<std::size_t>, cplx> cycle_traces;
  auto cycle_trace = [&](const std::vector<std::size_t>& cycle) -> cplx {
    if (auto it = cycle_traces.find(cycle); it != cycle_traces.end()) return it->second;
    cplx tr;
    if (cycle.size() == 1) {
      tr = ops[cycle[0]].trace();
    } else {
      Mat prefix = ops[cycle[0]];
      for (std::size_t k = 1; k + 1 < cycle.size(); ++k) prefix = prefix * ops[cycle[k]];
      tr = prefix.cwiseProduct(ops[cycle.back()].transpose()).sum();
    }
    cycle_traces.emplace(cycle, tr);
    return tr;
  };

  std::vector<std::size_t> perm(order);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<bool> seen(order);
  std::vector<std::size_t> cycle;
  cplx total = 0.0;
  do {
    std::fill(seen.begin(), seen.end(), false);
    cplx term = 1.0;
    for (std::size_t start = 0; start < order; ++start) {
      if (seen[start]) continue;
      cycle.clear();
      for (std::size_t j = start; !seen[j]; j = perm[j]) {
        seen[j] = true;
        cycle.push_back(j);
      }
      term *= cycle_trace(cycle);
    }
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));

  // (N-1)!/(N+M-1)! as a product of M reciprocals.
  double norm = 1.0;
  for (std::size_t k = 0; k < order; ++k) norm /= static_cast<double>(dim) + static_cast<double>(k);
  return total * norm;
}

double NonuniformFullTerms::at(cplx z) const {
  const auto [n, x, t] = shape(z, dim);
  return t / (n - 1.0) * first_term + (n * x - 1.0) / (n - 1.0) * ratio_term;
}

NonuniformFullTerms nonuniform_full_terms(const Mat& a, const Deformation& lambda,
                                          const Deformation& lambda_prime) {
  const Index dim = a.rows();
  require_dim(dim);
  require_same_dim(a.cols(), dim, "nonuniform_full_terms");
  require_same_dim(lambda.dim(), dim, "nonuniform_full_terms");
  require_same_dim(lambda_prime.dim(), dim, "nonuniform_full_terms");

  const Mat lp = lambda_prime.dense();
  const Mat l2 = lambda.dense_squared();
  const Mat alpha = lp * a * l2 * lp;
  const Mat beta = lp * l2 * lp;
  const Mat alpha_dag = alpha.adjoint();

  NonuniformFullTerms out;
  out.dim = dim;
  out.first_term = (lp * a * l2 * a.adjoint() * lp).trace().real() / static_cast<double>(dim);

  const std::vector<Mat> two{alpha, alpha_dag};
  const std::vector<Mat> three{beta, alpha, alpha_dag};
  const std::vector<Mat> four{beta, beta, alpha, alpha_dag};
  out.ratio_term = (3.0 * moment_product(two) - 3.0 * moment_product(three) +
                    moment_product(four))
                       .real();

  out.expansion_mean = beta.trace().real() / static_cast<double>(dim);
  out.in_validity_gate = out.expansion_mean >= kGateLow && out.expansion_mean <= kGateHigh;
  if (!out.in_validity_gate) {
    std::ostringstream msg;
    msg << "N Tr rho rho' = " << out.expansion_mean << " lies outside [" << kGateLow << ", "
        << kGateHigh << "]; the geometric-series approximation is unreliable";
    out.warnings.push_back(msg.str());
  }
  return out;
}

double approx_ha_full_nonuniform(const Mat& a, const Deformation& lambda,
                                 const Deformation& lambda_prime, cplx z) {
  return nonuniform_full_terms(a, lambda, lambda_prime).at(z);
}

double kumaraswamy_pdf(double s, Index dim) {
  require_dim(dim);
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("kumaraswamy_pdf: s must lie in [0, 1]");
  const double n = static_cast<double>(dim);
  return (n - 1.0) * std::pow(1.0 - s, n - 2.0);
}

double kumaraswamy_cdf(double s, Index dim) {
  require_dim(dim);
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("kumaraswamy_cdf: s must lie in [0, 1]");
  // 1 - (1-s)^(N-1), written to keep precision for small s.
  return -std::expm1(static_cast<double>(dim - 1) * std::log1p(-s));
}

MomentReport kumaraswamy_moments(Index dim) {
  require_dim(dim);
  const long double n = static_cast<long double>(dim);
  // E[s^k] = k! / (N (N+1) ... (N+k-1))
  long double raw[5] = {1.0L, 0, 0, 0, 0};
  for (int k = 1; k <= 4; ++k) raw[k] = raw[k - 1] * k / (n + k - 1);
  const long double mu = raw[1];
  const long double c2 = raw[2] - mu * mu;
  const long double c3 = raw[3] - 3 * mu * raw[2] + 2 * mu * mu * mu;
  const long double c4 = raw[4] - 4 * mu * raw[3] + 6 * mu * mu * raw[2] - 3 * mu * mu * mu * mu;
  return {static_cast<double>(mu), static_cast<double>(c2),
          static_cast<double>(c3 / std::pow(c2, 1.5L)), static_cast<double>(c4 / (c2 * c2))};
}

}  // namespace typlab
