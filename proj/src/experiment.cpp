#include "typlab/experiment.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>

#include "typlab/closedform.hpp"
#include "typlab/ensembles.hpp"
#include "typlab/errors.hpp"
#include "typlab/version.hpp"

namespace typlab {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 7> kNames{{
    {ExperimentKind::kFixedOverlapScan, "fixed-overlap-scan"},
    {ExperimentKind::kFullAverageScan, "full-average-scan"},
    {ExperimentKind::kHistogram, "histogram"},
    {ExperimentKind::kNonuniformFixedScan, "nonuniform-fixed-scan"},
    {ExperimentKind::kNonuniformFullScan, "nonuniform-full-scan"},
    {ExperimentKind::kFormFactor, "form-factor"},
    {ExperimentKind::kRhoSolve, "rho-solve"},
}};

// Stream tags below derive_seed(seed, .); trial streams use the grid index.
constexpr std::uint64_t kChiTag = 0x636869;       // fixed reference state
constexpr std::uint64_t kScanTag = 0x7363616e;    // per-theta Monte Carlo
constexpr std::uint64_t kHistogramTag = 0x68697374;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_decimal(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

double angle_from_json(const json& v, const char* key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_angle(v.get<std::string>());
  throw InvalidArgument(std::string("config: '") + key + "' must be a number or angle string");
}

struct Chain {
  FloquetOperator u;
  MagnetizationObservable mag;
};

Chain make_chain(const ExperimentConfig& c) {
  return {build_floquet(c.chain), build_magnetization(c.chain.n)};
}

// Reimann state for a magnetization value, with its sidecar entry.
DensityOperator solve_rho(const MagnetizationObservable& mag, double m, const char* label,
                          json& meta) {
  const ReimannSolution sol = solve_reimann_rho(mag, m);
  meta["y"][label] = sol.y;
  meta["purity"][label] = purity(sol.rho);
  meta["effective_dimension"][label] = effective_dimension(sol.rho);
  return sol.rho;
}

PureState fixed_chi(const ExperimentConfig& c, Index dim) {
  RandomStream rng(derive_seed(c.seed, kChiTag), 0);
  return sample_haar(dim, rng);
}

std::uint64_t point_seed(const ExperimentConfig& c, std::size_t k) {
  return derive_seed(derive_seed(c.seed, kScanTag), k);
}

const std::vector<std::string> kScanColumns{"theta",  "abs_z",  "analytic_mean", "analytic_std",
                                            "mc_mean", "mc_std", "mc_std_error",  "n_samples"};

// Shared scan loop: analytic(z) gives (mean, std); setup is completed with z.
template <typename Analytic>
void scan(const ExperimentConfig& c, FixedOverlapSetup setup, Analytic&& analytic,
          ExperimentOutput& out) {
  out.columns = kScanColumns;
  const std::vector<double> grid = theta_grid(c.theta_grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    ScanRecord r;
    r.theta = grid[k];
    r.abs_z = OverlapSpec::from_theta(r.theta).abs_z();
    const auto [mean, sd] = analytic(cplx(r.abs_z));
    r.analytic_mean = mean;
    r.analytic_std = sd;
    setup.z = r.abs_z;
    const EstimatorResult est =
        estimate_fixed_overlap(setup, {c.samples, point_seed(c, k), c.workers, false});
    r.mc_mean = est.mean;
    r.mc_std = est.std_dev;
    r.mc_std_error = est.std_error;
    r.n_samples = est.n_samples;
    out.records.push_back(r);
    out.rows.push_back({r.theta, r.abs_z, number_or_null(r.analytic_mean),
                        number_or_null(r.analytic_std), r.mc_mean, r.mc_std, r.mc_std_error,
                        r.n_samples});
  }
}

void run_fixed_overlap(const ExperimentConfig& c, ExperimentOutput& out) {
  const Chain ch = make_chain(c);
  const LinearOperator op = ch.u.as_operator();
  const PureState chi = fixed_chi(c, op.dim());
  const ChiElements e = chi_elements(chi, op);
  out.meta["chi_elements"] = {{"aad", e.aad}, {"abs_a_squared", std::norm(e.a)}};
  out.meta["K1"] = form_factor(ch.u, 1, c.workers);
  scan(c, {op, chi, std::nullopt, std::nullopt, 0.0, c.sampler},
       [&](cplx z) {
         return std::pair{ha_fixed_overlap(e, z, op.dim()),
                          std::sqrt(hv_fixed_overlap(e, z, op.dim()))};
       },
       out);
}

void run_full_average(const ExperimentConfig& c, ExperimentOutput& out) {
  const Chain ch = make_chain(c);
  const LinearOperator op = ch.u.as_operator();
  const UnitaryTraces t{trace_power(ch.u, 1, c.workers), trace_power(ch.u, 2, c.workers),
                        op.dim()};
  out.meta["K1"] = t.form_factor();
  out.meta["K2"] = std::norm(t.tr_u2) / static_cast<double>(t.dim);
  scan(c, {op, std::nullopt, std::nullopt, std::nullopt, 0.0, c.sampler},
       [&](cplx z) {
         return std::pair{ha_fixed_overlap_both_unitary(t.form_factor(), z, t.dim),
                          std::sqrt(hv_fixed_overlap_both_unitary(t, z))};
       },
       out);
}

void run_nonuniform_fixed(const ExperimentConfig& c, ExperimentOutput& out) {
  const Chain ch = make_chain(c);
  const LinearOperator op = ch.u.as_operator();
  const Deformation lambda(solve_rho(ch.mag, *c.m_z, "rho", out.meta));
  std::optional<Deformation> lambda_prime;
  if (c.m_z_prime) lambda_prime.emplace(solve_rho(ch.mag, *c.m_z_prime, "rho_prime", out.meta));
  out.meta["K1"] = form_factor(ch.u, 1, c.workers);

  const PureState chi = fixed_chi(c, op.dim());
  const Vec chi_prime = lambda_prime ? lambda_prime->apply(chi.amplitudes()) : chi.amplitudes();
  const DeformedChiElements e = deformed_chi_elements(chi_prime, op, lambda);
  scan(c, {op, chi, lambda, lambda_prime, 0.0, c.sampler},
       [&](cplx z) {
         return std::pair{ha_fixed_overlap_deformed(e, z, op.dim()),
                          std::sqrt(hv_fixed_overlap_deformed(e, z, op.dim()))};
       },
       out);
}

void run_nonuniform_full(const ExperimentConfig& c, ExperimentOutput& out) {
  const Chain ch = make_chain(c);
  const LinearOperator op = ch.u.as_operator();
  const Deformation lambda(solve_rho(ch.mag, *c.m_z, "rho", out.meta));
  const Deformation lambda_prime =
      c.m_z_prime ? Deformation(solve_rho(ch.mag, *c.m_z_prime, "rho_prime", out.meta))
                  : Deformation(DensityOperator::fully_mixed(op.dim()));
  out.meta["K1"] = form_factor(ch.u, 1, c.workers);

  const NonuniformFullTerms terms = nonuniform_full_terms(ch.u.dense(), lambda, lambda_prime);
  out.meta["expansion_mean"] = terms.expansion_mean;
  out.meta["in_validity_gate"] = terms.in_validity_gate;
  out.meta["warnings"] = terms.warnings;
  scan(c, {op, std::nullopt, lambda, lambda_prime, 0.0, c.sampler},
       [&](cplx z) { return std::pair{terms.at(z), std::nan("")}; }, out);
}

void run_histogram(const ExperimentConfig& c, ExperimentOutput& out) {
  const Chain ch = make_chain(c);
  const LinearOperator op = ch.u.as_operator();
  const HistogramResult h = histogram_transition(
      op, c.abs_z, c.bins, {c.samples, derive_seed(c.seed, kHistogramTag), c.workers, false});
  out.columns = {"bin_lo", "bin_hi", "count"};
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    out.rows.push_back({h.bin_edges[k], h.bin_edges[k + 1], h.counts[k]});
  }
  const auto moments = [](const MomentReport& m) {
    return json{{"mean", m.mean},
                {"variance", m.variance},
                {"skewness", m.skewness},
                {"kurtosis", m.kurtosis}};
  };
  out.meta["sample_moments"] = moments(h.moments);
  out.meta["mc_mean"] = h.estimate.mean;
  out.meta["mc_std_error"] = h.estimate.std_error;
  out.meta["reference_moments"] = moments(kumaraswamy_moments(op.dim()));
  out.meta["ks_statistic"] = h.ks_statistic ? json(*h.ks_statistic) : json(nullptr);
  out.meta["ks_critical_value_alpha_0.01"] = ks_critical_value(0.01, c.samples);
}

void run_form_factor(const ExperimentConfig& c, ExperimentOutput& out) {
  const FloquetOperator u = build_floquet(c.chain);
  out.columns = {"T", "trace_re", "trace_im", "form_factor"};
  for (int t = 0; t <= c.t_max; ++t) {
    const cplx tr = trace_power(u, t, c.workers);
    out.rows.push_back({t, tr.real(), tr.imag(), std::norm(tr) / static_cast<double>(u.dim())});
    if (t == 1) out.meta["K1"] = std::norm(tr) / static_cast<double>(u.dim());
  }
}

void run_rho_solve(const ExperimentConfig& c, ExperimentOutput& out) {
  const MagnetizationObservable mag = build_magnetization(c.chain.n);
  const RealVec diag = mag.diagonal();
  out.columns = {"m_z", "y", "purity", "effective_dimension", "trace", "trace_m", "iterations"};
  std::vector<double> targets{*c.m_z};
  if (c.m_z_prime) targets.push_back(*c.m_z_prime);
  const char* labels[] = {"rho", "rho_prime"};
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const ReimannSolution sol = solve_reimann_rho(mag, targets[k]);
    const RealVec& p = sol.rho.spectrum();
    out.rows.push_back({targets[k], sol.y, purity(sol.rho), effective_dimension(sol.rho), p.sum(),
                        p.dot(diag), sol.iterations});
    out.meta["y"][labels[k]] = sol.y;
    out.meta["purity"][labels[k]] = purity(sol.rho);
  }
}

}  // namespace

std::optional<ExperimentKind> parse_experiment(std::string_view name) {
  for (const auto& [kind, text] : kNames) {
    if (text == name) return kind;
  }
  return std::nullopt;
}

std::string_view experiment_name(ExperimentKind kind) {
  for (const auto& [k, text] : kNames) {
    if (k == kind) return text;
  }
  return "unknown";
}

bool is_scan(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kFixedOverlapScan:
    case ExperimentKind::kFullAverageScan:
    case ExperimentKind::kNonuniformFixedScan:
    case ExperimentKind::kNonuniformFullScan:
      return true;
    default:
      return false;
  }
}

double parse_angle(std::string_view text) {
  std::string_view s = trim(text);
  const auto fail = [&]() -> double {
    throw InvalidArgument("cannot parse angle '" + std::string(text) + "'");
  };
  const auto pos = s.find("pi");
  if (pos == std::string_view::npos) {
    double v = 0.0;
    return parse_decimal(s, v) ? v : fail();
  }
  std::string_view coef = trim(s.substr(0, pos));
  std::string_view rest = trim(s.substr(pos + 2));
  double sign = 1.0;
  if (!coef.empty() && (coef.front() == '-' || coef.front() == '+')) {
    if (coef.front() == '-') sign = -1.0;
    coef = trim(coef.substr(1));
  }
  if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
  double factor = 1.0;
  if (!coef.empty() && !parse_decimal(coef, factor)) return fail();
  double divisor = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') return fail();
    if (!parse_decimal(trim(rest.substr(1)), divisor) || divisor == 0.0) return fail();
  }
  return sign * factor * std::numbers::pi / divisor;
}

json ExperimentConfig::to_json() const {
  json j{{"experiment", experiment_name(experiment)},
         {"n", chain.n},
         {"J", chain.J},
         {"h", chain.h},
         {"b", chain.b},
         {"m_z", m_z ? json(*m_z) : json(nullptr)},
         {"m_z_prime", m_z_prime ? json(*m_z_prime) : json(nullptr)},
         {"theta_grid", theta_grid},
         {"samples", samples},
         {"seed", seed},
         {"output", output},
         {"format", format == OutputFormat::kCsv ? "csv" : "json"},
         {"workers", workers},
         {"bins", bins},
         {"abs_z", abs_z},
         {"t_max", t_max},
         {"sampler", sampler == DeformedSampler::kConstrainedUniform ? "constrained"
                                                                     : "inverse-complement"}};
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "experiment") {
        const auto kind = parse_experiment(v.get<std::string>());
        if (!kind) throw InvalidArgument("config: unknown experiment '" + v.get<std::string>() + "'");
        c.experiment = *kind;
      } else if (key == "n") {
        c.chain.n = v.get<int>();
      } else if (key == "J") {
        c.chain.J = angle_from_json(v, "J");
      } else if (key == "h") {
        c.chain.h = angle_from_json(v, "h");
      } else if (key == "b") {
        c.chain.b = angle_from_json(v, "b");
      } else if (key == "m_z") {
        c.m_z = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      } else if (key == "m_z_prime") {
        c.m_z_prime = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      } else if (key == "theta_grid" || key == "z_grid") {
        c.theta_grid = v.get<int>();
      } else if (key == "samples") {
        c.samples = v.get<std::size_t>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "output" || key == "out") {
        c.output = v.get<std::string>();
      } else if (key == "format") {
        const std::string f = v.get<std::string>();
        if (f == "csv") c.format = OutputFormat::kCsv;
        else if (f == "json") c.format = OutputFormat::kJson;
        else throw InvalidArgument("config: format must be csv or json");
      } else if (key == "workers") {
        c.workers = v.get<unsigned>();
      } else if (key == "bins") {
        c.bins = v.get<std::size_t>();
      } else if (key == "abs_z") {
        c.abs_z = v.get<double>();
      } else if (key == "t_max") {
        c.t_max = v.get<int>();
      } else if (key == "sampler") {
        const std::string s = v.get<std::string>();
        if (s == "constrained") c.sampler = DeformedSampler::kConstrainedUniform;
        else if (s == "inverse-complement") c.sampler = DeformedSampler::kInverseComplement;
        else throw InvalidArgument("config: sampler must be constrained or inverse-complement");
      } else {
        throw InvalidArgument("config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  return from_json(j, ExperimentConfig{});
}

void ExperimentConfig::validate() const {
  if (chain.n < 1) throw InvalidArgument("n must be at least 1");
  for (double a : {chain.J, chain.h, chain.b}) {
    if (!std::isfinite(a)) throw InvalidArgument("chain angles must be finite");
  }
  if (is_scan(experiment)) {
    if (theta_grid < 2) throw InvalidArgument("theta grid needs at least 2 points");
    if (samples < 2) throw InvalidArgument("scans need at least 2 samples per point");
  }
  if (experiment == ExperimentKind::kHistogram) {
    if (samples < 100) throw InvalidArgument("histogram needs at least 100 samples");
    if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
    if (!(abs_z >= 0.0 && abs_z <= 1.0)) throw InvalidArgument("abs_z must lie in [0, 1]");
  }
  if (experiment == ExperimentKind::kFormFactor && t_max < 0) {
    throw InvalidArgument("t_max must be non-negative");
  }
  const bool needs_m = experiment == ExperimentKind::kNonuniformFixedScan ||
                       experiment == ExperimentKind::kNonuniformFullScan ||
                       experiment == ExperimentKind::kRhoSolve;
  if (needs_m && !m_z) {
    throw InvalidArgument(std::string(experiment_name(experiment)) + " requires --m-z");
  }
  for (const auto& m : {m_z, m_z_prime}) {
    if (m && !std::isfinite(*m)) throw InvalidArgument("m_z values must be finite");
  }
}

std::vector<double> theta_grid(int points) {
  if (points < 2) throw InvalidArgument("theta grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    grid[static_cast<std::size_t>(k)] =
        std::numbers::pi / 2.0 * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return grid;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentOutput out;
  switch (config.experiment) {
    case ExperimentKind::kFixedOverlapScan: run_fixed_overlap(config, out); break;
    case ExperimentKind::kFullAverageScan: run_full_average(config, out); break;
    case ExperimentKind::kHistogram: run_histogram(config, out); break;
    case ExperimentKind::kNonuniformFixedScan: run_nonuniform_fixed(config, out); break;
    case ExperimentKind::kNonuniformFullScan: run_nonuniform_full(config, out); break;
    case ExperimentKind::kFormFactor: run_form_factor(config, out); break;
    case ExperimentKind::kRhoSolve: run_rho_solve(config, out); break;
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const ExperimentOutput& out) {
  for (std::size_t k = 0; k < out.columns.size(); ++k) os << (k ? "," : "") << out.columns[k];
  os << '\n';
  for (const auto& row : out.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) os << ',';
      const json& v = row[k];
      if (v.is_null()) os << "nan";
      else if (v.is_number_float()) os << format_number(v.get<double>());
      else os << v.dump();
    }
    os << '\n';
  }
}

json to_json_table(const ExperimentOutput& out) {
  json records = json::array();
  for (const auto& row : out.rows) {
    json r = json::object();
    for (std::size_t k = 0; k < row.size(); ++k) r[out.columns[k]] = row[k];
    records.push_back(std::move(r));
  }
  return records;
}

void run_to_files(const ExperimentConfig& config) {
  if (config.output.empty()) throw InvalidArgument("no output path given (--out)");
  const auto start = std::chrono::steady_clock::now();
  const ExperimentOutput out = run_experiment(config);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ofstream data(config.output);
  if (!data) throw InvalidArgument("cannot open output file '" + config.output + "'");
  if (config.format == OutputFormat::kCsv) write_csv(data, out);
  else data << to_json_table(out).dump(2) << '\n';
  if (!data) throw InvalidArgument("failed writing '" + config.output + "'");

  json meta = out.meta;
  meta["config"] = config.to_json();
  meta["seed"] = config.seed;
  meta["wall_time_s"] = wall;
  meta["version"] = std::string(kVersion);
  meta["columns"] = out.columns;
  std::ofstream side(config.output + ".meta.json");
  if (!side) throw InvalidArgument("cannot open metadata file for '" + config.output + "'");
  side << meta.dump(2) << '\n';
}

}  // namespace typlab
