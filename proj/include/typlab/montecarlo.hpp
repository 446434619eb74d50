#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "typlab/closedform.hpp"
#include "typlab/ensembles.hpp"
#include "typlab/linear_operator.hpp"
#include "typlab/parallel.hpp"
#include "typlab/rng.hpp"
#include "typlab/statespace.hpp"

namespace typlab {

/// Empirical mean and spread of one Monte Carlo run.
struct EstimatorResult {
  std::size_t n_samples = 0;
  double mean = 0.0;
  double std_dev = 0.0;    // Bessel-corrected
  double std_error = 0.0;  // std_dev / sqrt(n)
  std::vector<double> samples;  // empty unless retained
};

/// Ordered (deterministic) summary of per-trial values.
EstimatorResult summarize(std::span<const double> samples, bool retain = false);

/// Central moments of the raw samples; `variance` is the 1/n central moment
/// so that skewness and kurtosis are the usual standardized ratios.
MomentReport sample_moments(std::span<const double> samples);

/// Standard error of the Bessel-corrected sample variance, estimated from the
/// fourth sample moment.
double variance_standard_error(std::span<const double> samples);

struct TrialOptions {
  std::size_t n_samples = 10000;
  std::uint64_t seed = 42;
  unsigned workers = 0;  // 0: all hardware threads
  bool retain_samples = false;
};

/// Evaluate trial(rng, i) for every trial index i; trial i always draws from
/// RandomStream(seed, i), so the output does not depend on `workers`.
template <typename T, typename Trial>
std::vector<T> run_trials(std::size_t n, std::uint64_t seed, unsigned workers, Trial&& trial) {
  std::vector<T> out(n);
  parallel_for(n, workers, [&](std::size_t i) {
    RandomStream rng(seed, static_cast<std::uint64_t>(i));
    out[i] = trial(rng, i);
  });
  return out;
}

/// How psi is drawn once a deformation Lambda is present.
enum class DeformedSampler {
  /// psi uniform at fixed overlap |z| with L chi/|L chi|; realizes the
  /// delta-constrained Hilbert space average exactly.
  kConstrainedUniform,
  /// psi from `deformed_fixed_overlap_state` (L^-1 applied to chi_perp).
  kInverseComplement,
};

/// One fixed-overlap experiment: |<chi'|A L|psi>|^2 with chi' = L' chi and
/// <L chi'|psi>/|L chi'| = |z| (phase of z on the reference coefficient).
/// Without deformations this is |<chi|A|psi>|^2 with <chi|psi> = z.
struct FixedOverlapSetup {
  LinearOperator op;
  /// Fixed chi; std::nullopt draws a Haar chi in every trial.
  std::optional<PureState> chi;
  std::optional<Deformation> lambda;
  std::optional<Deformation> lambda_prime;
  cplx z = 0.0;
  DeformedSampler sampler = DeformedSampler::kConstrainedUniform;
};

EstimatorResult estimate_fixed_overlap(const FixedOverlapSetup& setup, const TrialOptions& opts);

using StateSampler = std::function<PureState(RandomStream&)>;
using StateFunctional = std::function<double(const PureState&)>;

/// Empirical HA/HV of an arbitrary functional over sampled states.
EstimatorResult estimate_generic(const StateFunctional& f, const StateSampler& sampler,
                                 const TrialOptions& opts);

StateSampler haar_sampler(Index dim);

struct HistogramResult {
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  MomentReport moments;
  std::optional<double> ks_statistic;
  EstimatorResult estimate;
};

/// Kolmogorov-Smirnov distance between the empirical CDF and `cdf`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic one-sample critical value sqrt(-ln(alpha/2)/2) / sqrt(n).
double ks_critical_value(double alpha, std::size_t n);

/// Histogram of |<chi|U|psi>|^2 over independent (chi, psi) pairs with
/// |<chi|psi>| = |z|. When `reference_cdf` is empty and z == 0 the KS
/// distance is taken against the Kumaraswamy law.
HistogramResult histogram_transition(const LinearOperator& op, cplx z, std::size_t n_bins,
                                     const TrialOptions& opts,
                                     std::function<double(double)> reference_cdf = {});

}  // namespace typlab
