#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "typlab/kicked_ising.hpp"
#include "typlab/montecarlo.hpp"

// Experiment runner behind the typicality-lab command line tool. Each scan
// experiment produces one ScanRecord per theta grid point; the remaining
// experiments write their own small tables.

namespace typlab {

enum class ExperimentKind {
  kFixedOverlapScan,
  kFullAverageScan,
  kHistogram,
  kNonuniformFixedScan,
  kNonuniformFullScan,
  kFormFactor,
  kRhoSolve,
};

std::optional<ExperimentKind> parse_experiment(std::string_view name);
std::string_view experiment_name(ExperimentKind kind);
bool is_scan(ExperimentKind kind);

enum class OutputFormat { kCsv, kJson };

/// Parse "0.25", "pi", "-pi/4", "2pi/5", "3*pi/8" to full double precision.
/// Throws InvalidArgument on anything else.
double parse_angle(std::string_view text);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kFixedOverlapScan;
  KicParams chain{8, 0.7853981633974483, 0.6283185307179586, 0.7853981633974483};
  std::optional<double> m_z;
  std::optional<double> m_z_prime;
  int theta_grid = 21;
  std::size_t samples = 10000;
  std::uint64_t seed = 42;
  std::string output;
  OutputFormat format = OutputFormat::kCsv;
  unsigned workers = 0;  // 0: available parallelism; never changes results
  // histogram
  std::size_t bins = 50;
  double abs_z = 0.0;
  // form-factor
  int t_max = 10;
  DeformedSampler sampler = DeformedSampler::kConstrainedUniform;

  nlohmann::json to_json() const;
  /// Overlay the keys present in `j` on `base`.
  static ExperimentConfig from_json(const nlohmann::json& j, ExperimentConfig base);
  static ExperimentConfig from_json(const nlohmann::json& j);
  /// Throws InvalidArgument when a field is missing or out of range.
  void validate() const;
};

struct ScanRecord {
  double theta = 0.0;
  double abs_z = 0.0;
  double analytic_mean = 0.0;
  double analytic_std = 0.0;
  double mc_mean = 0.0;
  double mc_std = 0.0;
  double mc_std_error = 0.0;
  std::size_t n_samples = 0;
};

inline constexpr std::string_view kScanCsvHeader =
    "theta,abs_z,analytic_mean,analytic_std,mc_mean,mc_std,mc_std_error,n_samples";

/// Tabular output of one experiment plus everything that goes into the
/// metadata sidecar (apart from timing and the config echo).
struct ExperimentOutput {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;  // numbers, or null for NaN
  std::vector<ScanRecord> records;                // scans only
  nlohmann::json meta = nlohmann::json::object();
};

std::vector<double> theta_grid(int points);

/// Run the experiment without touching the filesystem.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// A double with 17 significant digits; NaN prints as "nan".
std::string format_number(double v);

void write_csv(std::ostream& os, const ExperimentOutput& out);
nlohmann::json to_json_table(const ExperimentOutput& out);

/// Run, then write `config.output` and `<output>.meta.json`.
void run_to_files(const ExperimentConfig& config);

}  // namespace typlab
