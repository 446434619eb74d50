#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "typlab/errors.hpp"
#include "typlab/experiment.hpp"
#include "typlab/version.hpp"

namespace {

// Exit codes: 0 success, 1 configuration error, 2 numeric failure.
constexpr int kConfigError = 1;
constexpr int kNumericError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hilbert space averages of transition probabilities on the kicked Ising chain"};
  app.set_help_flag("--help", "print this help and exit");
  app.set_version_flag("--version", std::string(typlab::kVersion));

  std::optional<std::string> experiment;
  std::optional<std::string> config_path;
  std::optional<int> n, z_grid, t_max;
  std::optional<std::string> j_angle, h_angle, b_angle;
  std::optional<double> m_z, m_z_prime, abs_z;
  std::optional<std::size_t> samples, bins;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, format, sampler;
  std::optional<unsigned> workers;

  app.add_option("experiment", experiment,
                 "fixed-overlap-scan | full-average-scan | histogram | nonuniform-fixed-scan | "
                 "nonuniform-full-scan | form-factor | rho-solve");
  app.add_option("--config", config_path, "JSON config file; flags override its keys");
  app.add_option("--n", n, "number of spins");
  app.add_option("--J", j_angle, "Ising coupling (e.g. pi/4)");
  app.add_option("--h", h_angle, "longitudinal field (e.g. pi/5)");
  app.add_option("--b", b_angle, "transverse kick (e.g. pi/4)");
  app.add_option("--m-z", m_z, "magnetization of rho");
  app.add_option("--m-z-prime", m_z_prime, "magnetization of rho'");
  app.add_option("--z-grid", z_grid, "number of theta points on [0, pi/2]");
  app.add_option("--samples", samples, "Monte Carlo samples per point");
  app.add_option("--seed", seed, "64-bit seed");
  app.add_option("--out", out, "output path; metadata goes to <out>.meta.json");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", workers, "worker threads (0: available parallelism)");
  app.add_option("--bins", bins, "histogram bins");
  app.add_option("--abs-z", abs_z, "fixed |<chi|psi>| for histogram");
  app.add_option("--t-max", t_max, "largest period for form-factor");
  app.add_option("--sampler", sampler, "deformed psi sampler: constrained | inverse-complement")
      ->check(CLI::IsMember({"constrained", "inverse-complement"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    typlab::ExperimentConfig config;
    bool has_experiment = experiment.has_value();
    if (config_path) {
      std::ifstream in(*config_path);
      if (!in) throw typlab::InvalidArgument("cannot read config file '" + *config_path + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw typlab::InvalidArgument(std::string("config file: ") + e.what());
      }
      has_experiment = has_experiment || (j.is_object() && j.contains("experiment"));
      config = typlab::ExperimentConfig::from_json(j);
    }

    nlohmann::json flags = nlohmann::json::object();
    if (experiment) flags["experiment"] = *experiment;
    if (n) flags["n"] = *n;
    if (j_angle) flags["J"] = *j_angle;
    if (h_angle) flags["h"] = *h_angle;
    if (b_angle) flags["b"] = *b_angle;
    if (m_z) flags["m_z"] = *m_z;
    if (m_z_prime) flags["m_z_prime"] = *m_z_prime;
    if (z_grid) flags["theta_grid"] = *z_grid;
    if (samples) flags["samples"] = *samples;
    if (seed) flags["seed"] = *seed;
    if (out) flags["output"] = *out;
    if (format) flags["format"] = *format;
    if (workers) flags["workers"] = *workers;
    if (bins) flags["bins"] = *bins;
    if (abs_z) flags["abs_z"] = *abs_z;
    if (t_max) flags["t_max"] = *t_max;
    if (sampler) flags["sampler"] = *sampler;
    config = typlab::ExperimentConfig::from_json(flags, config);

    if (!has_experiment) throw typlab::InvalidArgument("no experiment given");
    typlab::run_to_files(config);
  } catch (const typlab::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const typlab::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericError;
  }
  return 0;
}
