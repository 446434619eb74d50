#include "typlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "typlab/errors.hpp"

namespace typlab {

EstimatorResult summarize(std::span<const double> samples, bool retain) {
  EstimatorResult r;
  r.n_samples = samples.size();
  if (samples.empty()) return r;
  double sum = 0.0;
  for (double v : samples) sum += v;
  r.mean = sum / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - r.mean) * (v - r.mean);
    r.std_dev = std::sqrt(ss / static_cast<double>(samples.size() - 1));
    r.std_error = r.std_dev / std::sqrt(static_cast<double>(samples.size()));
  }
  if (retain) r.samples.assign(samples.begin(), samples.end());
  return r;
}

MomentReport sample_moments(std::span<const double> samples) {
  MomentReport m;
  if (samples.empty()) return m;
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double v : samples) sum += v;
  m.mean = sum / n;
  double c2 = 0.0, c3 = 0.0, c4 = 0.0;
  for (double v : samples) {
    const double d = v - m.mean;
    const double d2 = d * d;
    c2 += d2;
    c3 += d2 * d;
    c4 += d2 * d2;
  }
  c2 /= n;
  c3 /= n;
  c4 /= n;
  m.variance = c2;
  if (c2 > 0.0) {
    m.skewness = c3 / std::pow(c2, 1.5);
    m.kurtosis = c4 / (c2 * c2);
  }
  return m;
}

double variance_standard_error(std::span<const double> samples) {
  const double n = static_cast<double>(samples.size());
  if (n < 4) return 0.0;
  const MomentReport m = sample_moments(samples);
  const double s2 = m.variance * n / (n - 1.0);
  const double c4 = m.kurtosis * m.variance * m.variance;
  return std::sqrt(std::max(0.0, (c4 - (n - 3.0) / (n - 1.0) * s2 * s2) / n));
}

namespace {

// Everything a trial needs once chi is known: the bra vector w with
// value = |<w|psi>|^2 and the reference the overlap is fixed against.
struct TrialFrame {
  Vec bra;
  PureState reference;
  PureState chi_normalized;
};

TrialFrame make_frame(const FixedOverlapSetup& s, const PureState& chi) {
  Vec chi_prime = s.lambda_prime ? s.lambda_prime->apply(chi.amplitudes()) : chi.amplitudes();
  Vec bra = s.op.apply_adjoint(chi_prime);
  Vec reference = chi_prime;
  if (s.lambda) {
    bra = s.lambda->apply(bra);
    reference = s.lambda->apply(chi_prime);
  }
  return {std::move(bra), PureState::normalized(reference), PureState::normalized(chi_prime)};
}

double run_trial(const FixedOverlapSetup& s, const OverlapSpec& spec, const TrialFrame& f,
                 RandomStream& rng) {
  if (s.lambda && s.sampler == DeformedSampler::kInverseComplement) {
    const PureState psi = deformed_fixed_overlap_state(f.chi_normalized, *s.lambda, spec, rng);
    return std::norm(f.bra.dot(psi.amplitudes()));
  }
  const PureState psi = fixed_overlap_state(f.reference, spec, rng);
  return std::norm(f.bra.dot(psi.amplitudes()));
}

}  // namespace

EstimatorResult estimate_fixed_overlap(const FixedOverlapSetup& setup, const TrialOptions& opts) {
  if (opts.n_samples < 1) throw InvalidArgument("estimate_fixed_overlap: need at least one sample");
  const Index dim = setup.op.dim();
  if (setup.chi) require_same_dim(setup.chi->dim(), dim, "estimate_fixed_overlap");
  if (setup.lambda) require_same_dim(setup.lambda->dim(), dim, "estimate_fixed_overlap");
  if (setup.lambda_prime) {
    require_same_dim(setup.lambda_prime->dim(), dim, "estimate_fixed_overlap");
  }
  const OverlapSpec spec = OverlapSpec::from_z(setup.z);

  std::optional<TrialFrame> fixed;
  if (setup.chi) fixed = make_frame(setup, *setup.chi);

  const auto values = run_trials<double>(
      opts.n_samples, opts.seed, opts.workers, [&](RandomStream& rng, std::size_t) {
        if (fixed) return run_trial(setup, spec, *fixed, rng);
        const PureState chi = sample_haar(dim, rng);
        return run_trial(setup, spec, make_frame(setup, chi), rng);
      });
  return summarize(values, opts.retain_samples);
}

EstimatorResult estimate_generic(const StateFunctional& f, const StateSampler& sampler,
                                 const TrialOptions& opts) {
  if (opts.n_samples < 1) throw InvalidArgument("estimate_generic: need at least one sample");
  const auto values = run_trials<double>(opts.n_samples, opts.seed, opts.workers,
                                         [&](RandomStream& rng, std::size_t) {
                                           return f(sampler(rng));
                                         });
  return summarize(values, opts.retain_samples);
}

StateSampler haar_sampler(Index dim) {
  return [dim](RandomStream& rng) { return sample_haar(dim, rng); };
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidArgument("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_value(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0) || n == 0) {
    throw DomainError("ks_critical_value: need 0 < alpha < 1 and n > 0");
  }
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

HistogramResult histogram_transition(const LinearOperator& op, cplx z, std::size_t n_bins,
                                     const TrialOptions& opts,
                                     std::function<double(double)> reference_cdf) {
  if (opts.n_samples < 100) throw InvalidArgument("histogram_transition: need at least 100 samples");
  if (n_bins < 1) throw InvalidArgument("histogram_transition: need at least one bin");

  FixedOverlapSetup setup{op, std::nullopt, std::nullopt, std::nullopt, z};
  TrialOptions keep = opts;
  keep.retain_samples = true;
  HistogramResult h;
  h.estimate = estimate_fixed_overlap(setup, keep);
  const std::vector<double>& samples = h.estimate.samples;

  const double top = *std::max_element(samples.begin(), samples.end());
  const double upper = top > 0.0 ? top : 1.0;
  h.bin_edges.resize(n_bins + 1);
  for (std::size_t k = 0; k <= n_bins; ++k) {
    h.bin_edges[k] = upper * static_cast<double>(k) / static_cast<double>(n_bins);
  }
  h.counts.assign(n_bins, 0);
  for (double v : samples) {
    auto k = static_cast<std::size_t>(v / upper * static_cast<double>(n_bins));
    ++h.counts[std::min(k, n_bins - 1)];
  }
  h.moments = sample_moments(samples);

  if (!reference_cdf && z == cplx(0.0)) {
    const Index dim = op.dim();
    reference_cdf = [dim](double s) { return kumaraswamy_cdf(std::clamp(s, 0.0, 1.0), dim); };
  }
  if (reference_cdf) h.ks_statistic = ks_statistic(samples, reference_cdf);
  if (!opts.retain_samples) h.estimate.samples.clear();
  return h;
}

}  // namespace typlab
