#pragma once

#include <span>
#include <string>
#include <vector>

#include "typlab/ensembles.hpp"
#include "typlab/linear_operator.hpp"
#include "typlab/statespace.hpp"
#include "typlab/types.hpp"

// Closed-form Hilbert space averages (HA) and variances (HV).
//
// Every fixed-overlap formula depends on z only through |z|; the functions
// take a complex z and throw DomainError when |z| > 1.

namespace typlab {

/// Prefactors of the fixed-overlap variance; they always sum to zero.
struct LambdaCoefficients {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;

  double sum() const noexcept { return l1 + l2 + l3; }
};

LambdaCoefficients lambda_coefficients(cplx z, Index dim);

struct MomentReport {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // non-excess: 3 for a Gaussian, 9 for an exponential
};

/// Map tiny negative variances from cancellation to zero. Anything below
/// -1e-12 signals a real inconsistency and throws NumericError.
double clamp_variance(double v);

// --- expectation values --------------------------------------------------

/// HA[<psi|M|psi>] = Tr M / N
cplx ha_expectation(cplx trace_m, Index dim);
/// HV[<psi|M|psi>] = (Tr M^2 / N - |Tr M|^2 / N^2) / (N + 1), M Hermitian.
double hv_expectation(cplx trace_m, cplx trace_m2, Index dim);

// --- matrix elements with a fixed chi ------------------------------------

/// <chi|A A^dag|chi> and <chi|A|chi>.
struct ChiElements {
  double aad = 0.0;
  cplx a = 0.0;
};

ChiElements chi_elements(const PureState& chi, const LinearOperator& a);

/// <chi|A L^2 A^dag|chi>, <chi|A L^2|chi> and <chi|L^2|chi>.
///
/// `chi` need not be normalized; the averages over chi' = L' chi use it with
/// an unnormalized reference vector.
struct DeformedChiElements {
  double al2ad = 0.0;
  cplx al2 = 0.0;
  double l2 = 0.0;
};

DeformedChiElements deformed_chi_elements(const Vec& chi, const LinearOperator& a,
                                          const Deformation& lambda);

// --- transition probabilities, no overlap constraint ----------------------

double ha_transition_uniform(const ChiElements& e, Index dim);
double ha_transition_uniform(const PureState& chi, const LinearOperator& a);
/// Tr A A^dag / N^2
double ha_transition_both(double trace_aad, Index dim);
/// Tr rho' A rho A^dag
double ha_transition_deformed(const DensityOperator& rho, const DensityOperator& rho_prime,
                              const Mat& a);

double hv_transition_uniform(const ChiElements& e, Index dim);
double hv_transition_uniform(const PureState& chi, const LinearOperator& a);
/// (N-1)/(N^3 (N+1)^2) (Tr (A A^dag)^2 + Tr^2 A A^dag)
double hv_transition_both(double trace_aad_squared, double trace_aad, Index dim);
double hv_transition_both(const Mat& a);

// --- fixed overlap <chi|psi> = z, chi fixed -------------------------------

double ha_fixed_overlap(const ChiElements& e, cplx z, Index dim);
double ha_fixed_overlap(const PureState& chi, const LinearOperator& a, cplx z);
/// HA of |<chi|A|psi>|^4 under the constraint.
double second_moment_fixed_overlap(const ChiElements& e, cplx z, Index dim);
double hv_fixed_overlap(const ChiElements& e, cplx z, Index dim);
double hv_fixed_overlap(const PureState& chi, const LinearOperator& a, cplx z);

// --- fixed overlap, averaged over chi as well -----------------------------

double ha_fixed_overlap_both(double trace_aad, cplx trace_a, cplx z, Index dim);
/// Unitary A: (N - |z|^2)/(N^2 - 1) + (N |z|^2 - 1)/(N^2 - 1) K(1).
double ha_fixed_overlap_both_unitary(double k1, cplx z, Index dim);

struct UnitaryTraces {
  cplx tr_u = 0.0;
  cplx tr_u2 = 0.0;
  Index dim = 0;

  double form_factor() const { return std::norm(tr_u) / static_cast<double>(dim); }
};

/// HA_chi[|<chi|U|chi>|^2] = (|Tr U|^2 + N) / (N (N + 1))
double overlap_second_moment_unitary(const UnitaryTraces& t);
/// HA_chi[|<chi|U|chi>|^4] from Tr U and Tr U^2.
double overlap_fourth_moment_unitary(const UnitaryTraces& t);
double second_moment_fixed_overlap_both_unitary(const UnitaryTraces& t, cplx z);
double hv_fixed_overlap_both_unitary(const UnitaryTraces& t, cplx z);

/// d/d|z| of the unitary both-states average: 2|z| (N K(1) - 1)/(N^2 - 1).
double slope_fixed_overlap_both(double k1, cplx z, Index dim);

// --- deformed (nonuniform) ensembles ---------------------------------------

double ha_fixed_overlap_deformed(const DeformedChiElements& e, cplx z, Index dim);
double ha_fixed_overlap_deformed(const PureState& chi, const LinearOperator& a,
                                 const Deformation& lambda, cplx z);
double hv_fixed_overlap_deformed(const DeformedChiElements& e, cplx z, Index dim);
double hv_fixed_overlap_deformed(const PureState& chi, const LinearOperator& a,
                                 const Deformation& lambda, cplx z);

/// HA[<chi|B_1|chi> ... <chi|B_M|chi>] over Haar chi, 1 <= M <= 6.
///
/// Evaluated as (N-1)!/(N+M-1)! times the sum over permutations of the
/// product of traces along each cycle (the permanent of the delta matrix).
cplx moment_product(std::span<const Mat> ops);

/// Pieces of the second-order geometric-series approximation for the
/// average over both nonuniform states; independent of z.
struct NonuniformFullTerms {
  Index dim = 0;
  /// Tr(L' A L^2 A^dag L') / N
  double first_term = 0.0;
  /// 3 HA[|a|^2] - 3 HA[b |a|^2] + HA[b^2 |a|^2], a = <chi|L'AL^2L'|chi>,
  /// b = <chi|L'L^2L'|chi>.
  double ratio_term = 0.0;
  /// HA[b] = N Tr rho rho'; the expansion assumes this is close to one.
  double expansion_mean = 0.0;
  bool in_validity_gate = true;
  std::vector<std::string> warnings;

  double at(cplx z) const;
};

/// Validity gate on N Tr rho rho'.
inline constexpr double kGateLow = 0.5;
inline constexpr double kGateHigh = 1.5;

NonuniformFullTerms nonuniform_full_terms(const Mat& a, const Deformation& lambda,
                                          const Deformation& lambda_prime);
double approx_ha_full_nonuniform(const Mat& a, const Deformation& lambda,
                                 const Deformation& lambda_prime, cplx z);

// --- distribution of |<chi|U|psi>|^2 for independent Haar states ----------

double kumaraswamy_pdf(double s, Index dim);
double kumaraswamy_cdf(double s, Index dim);
/// Exact finite-N moments of p(s) = (N-1)(1-s)^(N-2).
MomentReport kumaraswamy_moments(Index dim);

}  // namespace typlab
