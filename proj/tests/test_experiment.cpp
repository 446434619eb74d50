#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "json.hpp"

#include "typlab/errors.hpp"
#include "typlab/experiment.hpp"

using namespace typlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Enough of JSON Schema for the shipped schema files: type, enum, minimum,
// maximum, required, properties, additionalProperties, items.
bool type_matches(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  return false;
}

void validate(const json& v, const json& schema, const std::string& path,
              std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    bool ok = false;
    if (schema["type"].is_array()) {
      for (const auto& t : schema["type"]) ok = ok || type_matches(v, t.get<std::string>());
    } else {
      ok = type_matches(v, schema["type"].get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": wrong type");
      return;
    }
  }
  if (schema.contains("enum") && std::find(schema["enum"].begin(), schema["enum"].end(), v) ==
                                     schema["enum"].end()) {
    errors.push_back(path + ": not in enum");
  }
  if (v.is_number()) {
    if (schema.contains("minimum") && v.get<double>() < schema["minimum"].get<double>()) {
      errors.push_back(path + ": below minimum");
    }
    if (schema.contains("maximum") && v.get<double>() > schema["maximum"].get<double>()) {
      errors.push_back(path + ": above maximum");
    }
  }
  if (v.is_object()) {
    for (const auto& key : schema.value("required", json::array())) {
      if (!v.contains(key.get<std::string>())) errors.push_back(path + ": missing " + key.get<std::string>());
    }
    const json props = schema.value("properties", json::object());
    for (const auto& [key, child] : v.items()) {
      if (props.contains(key)) {
        validate(child, props[key], path + "." + key, errors);
      } else if (schema.contains("additionalProperties")) {
        const json& extra = schema["additionalProperties"];
        if (extra.is_boolean() && !extra.get<bool>()) errors.push_back(path + ": unexpected " + key);
        if (extra.is_object()) validate(child, extra, path + "." + key, errors);
      }
    }
  }
  if (v.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      validate(v[i], schema["items"], path + "[" + std::to_string(i) + "]", errors);
    }
  }
}

std::vector<std::string> validate_file(const fs::path& doc, const std::string& schema_name) {
  std::ifstream d(doc), s(fs::path(TYPLAB_SCHEMA_DIR) / schema_name);
  const json j = json::parse(d), schema = json::parse(s);
  std::vector<std::string> errors;
  validate(j, schema, "$", errors);
  return errors;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TYPLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("typlab_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig small_scan(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.chain = {6, std::numbers::pi / 4, std::numbers::pi / 5, std::numbers::pi / 4};
  c.theta_grid = 5;
  c.samples = 2000;
  c.seed = 12345;
  return c;
}

}  // namespace

TEST_CASE("angle literals parse to full precision") {
  CHECK(parse_angle("pi/4") == std::numbers::pi / 4);
  CHECK(parse_angle("pi/5") == std::numbers::pi / 5);
  CHECK(parse_angle("2pi/5") == 2 * std::numbers::pi / 5);
  CHECK(parse_angle(" -pi ") == -std::numbers::pi);
  CHECK(parse_angle("3*pi/8") == 3 * std::numbers::pi / 8);
  CHECK(parse_angle("0.25") == 0.25);
  CHECK(parse_angle("0") == 0.0);
  CHECK(parse_angle("-1e-3") == -1e-3);
  for (const char* bad : {"", "pie", "pi/", "pi/0", "2 pi x", "abc", "pi*2", "1/4"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_angle(bad), InvalidArgument);
  }
}

TEST_CASE("experiment names round-trip") {
  for (const char* name : {"fixed-overlap-scan", "full-average-scan", "histogram",
                           "nonuniform-fixed-scan", "nonuniform-full-scan", "form-factor",
                           "rho-solve"}) {
    const auto kind = parse_experiment(name);
    REQUIRE(kind.has_value());
    CHECK(experiment_name(*kind) == name);
  }
  CHECK_FALSE(parse_experiment("scan").has_value());
}

TEST_CASE("config JSON round-trip, overrides and validation") {
  ExperimentConfig c = small_scan(ExperimentKind::kNonuniformFullScan);
  c.m_z = 0.5;
  c.m_z_prime = -0.3;
  c.output = "x.csv";
  c.format = OutputFormat::kJson;
  const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());

  const ExperimentConfig file = ExperimentConfig::from_json(
      json{{"experiment", "rho-solve"}, {"n", 4}, {"J", "pi/4"}, {"m_z", 1.0}});
  CHECK(file.chain.J == std::numbers::pi / 4);
  const ExperimentConfig merged = ExperimentConfig::from_json(json{{"m_z", 2.0}}, file);
  CHECK(merged.experiment == ExperimentKind::kRhoSolve);
  CHECK(*merged.m_z == 2.0);
  CHECK(merged.chain.n == 4);

  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"bogus", 1}}), InvalidArgument);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"n", "eight"}}), InvalidArgument);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"format", "xml"}}), InvalidArgument);

  ExperimentConfig missing = small_scan(ExperimentKind::kNonuniformFixedScan);
  CHECK_THROWS_AS(missing.validate(), InvalidArgument);
  ExperimentConfig grid = small_scan(ExperimentKind::kFixedOverlapScan);
  grid.theta_grid = 1;
  CHECK_THROWS_AS(grid.validate(), InvalidArgument);
}

TEST_CASE("theta grid is uniform on [0, pi/2]") {
  const std::vector<double> g = theta_grid(21);
  REQUIRE(g.size() == 21);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == std::numbers::pi / 2);
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] - g[k - 1] == doctest::Approx(std::numbers::pi / 40));
}

TEST_CASE("number formatting keeps 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(std::stod(format_number(std::numbers::pi)) == std::numbers::pi);
}

TEST_CASE("scan experiments produce consistent records") {
  for (ExperimentKind kind : {ExperimentKind::kFixedOverlapScan, ExperimentKind::kFullAverageScan,
                              ExperimentKind::kNonuniformFixedScan,
                              ExperimentKind::kNonuniformFullScan}) {
    ExperimentConfig c = small_scan(kind);
    c.m_z = 0.5;
    c.m_z_prime = -0.3;
    CAPTURE(experiment_name(kind));
    const ExperimentOutput out = run_experiment(c);
    REQUIRE(out.records.size() == 5);
    std::ostringstream csv;
    write_csv(csv, out);
    CHECK(csv.str().substr(0, kScanCsvHeader.size() + 1) == std::string(kScanCsvHeader) + "\n");
    for (const ScanRecord& r : out.records) {
      CHECK(std::abs(r.abs_z - std::cos(r.theta)) < 1e-12);
      CHECK(r.n_samples == 2000);
      CHECK(r.mc_std_error <= r.mc_std);
      CHECK(std::isfinite(r.analytic_mean));
    }
    if (kind == ExperimentKind::kNonuniformFullScan) {
      CHECK(std::isnan(out.records[0].analytic_std));
      CHECK(out.meta.contains("expansion_mean"));
    } else {
      CHECK(out.records.back().analytic_std > 0.0);
    }
  }
}

TEST_CASE("fixed-overlap scan matches the closed form on the chaotic chain") {
  ExperimentConfig c;
  c.theta_grid = 11;
  c.samples = 10000;
  const ExperimentOutput out = run_experiment(c);
  for (const ScanRecord& r : out.records) {
    CAPTURE(r.theta);
    CHECK(std::abs(r.mc_mean - r.analytic_mean) <= std::max(3.0 * r.mc_std_error, 1e-12));
  }
}

TEST_CASE("rho-solve and form-factor tables") {
  ExperimentConfig c;
  c.experiment = ExperimentKind::kRhoSolve;
  c.m_z = 0.0;
  const ExperimentOutput rho = run_experiment(c);
  REQUIRE(rho.rows.size() == 1);
  CHECK(rho.rows[0][1].get<double>() == 0.0);
  CHECK(rho.rows[0][2].get<double>() == doctest::Approx(1.0 / 256).epsilon(1e-13));

  c.m_z = 8.0;
  CHECK_THROWS_AS(run_experiment(c), OutOfRange);

  ExperimentConfig f;
  f.experiment = ExperimentKind::kFormFactor;
  f.chain = {4, 0.0, 0.0, std::numbers::pi / 4};
  f.t_max = 3;
  const ExperimentOutput ff = run_experiment(f);
  REQUIRE(ff.rows.size() == 4);
  CHECK(ff.rows[0][3].get<double>() == 16.0);
  CHECK(ff.rows[1][3].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("histogram experiment reports moments and KS distance") {
  ExperimentConfig c;
  c.experiment = ExperimentKind::kHistogram;
  c.chain.n = 6;
  c.samples = 2000;
  c.bins = 20;
  const ExperimentOutput h = run_experiment(c);
  CHECK(h.rows.size() == 20);
  std::size_t total = 0;
  for (const auto& row : h.rows) total += row[2].get<std::size_t>();
  CHECK(total == 2000);
  CHECK(h.meta["ks_statistic"].is_number());
}

TEST_CASE("files, sidecar, schema and re-run from the echoed config") {
  const fs::path dir = scratch_dir();
  ExperimentConfig c = small_scan(ExperimentKind::kNonuniformFixedScan);
  c.m_z = 3.0;
  c.output = (dir / "scan.csv").string();
  run_to_files(c);
  const std::string first = slurp(c.output);
  CHECK(validate_file(c.output + ".meta.json", "meta.schema.json").empty());

  std::ifstream meta_in(c.output + ".meta.json");
  const json meta = json::parse(meta_in);
  CHECK(meta["seed"] == c.seed);
  CHECK(meta["purity"].contains("rho"));
  ExperimentConfig again = ExperimentConfig::from_json(meta["config"]);
  again.output = (dir / "again.csv").string();
  run_to_files(again);
  CHECK(slurp(again.output) == first);

  c.format = OutputFormat::kJson;
  c.output = (dir / "scan.json").string();
  run_to_files(c);
  const auto errors = validate_file(c.output, "scan_records.schema.json");
  for (const auto& e : errors) MESSAGE(e);
  CHECK(errors.empty());

  ExperimentConfig full = small_scan(ExperimentKind::kNonuniformFullScan);
  full.m_z = 0.5;
  full.format = OutputFormat::kJson;
  full.output = (dir / "full.json").string();
  run_to_files(full);
  CHECK(validate_file(full.output, "scan_records.schema.json").empty());
  CHECK(validate_file(full.output + ".meta.json", "meta.schema.json").empty());
  fs::remove_all(dir);
}

TEST_CASE("command line exit codes and flag overrides") {
  const fs::path dir = scratch_dir();
  const std::string out = (dir / "cli.csv").string();
  CHECK(run_cli("rho-solve --n 8 --m-z 0 --out " + out) == 0);
  CHECK(slurp(out).rfind("m_z,y,purity", 0) == 0);
  CHECK(run_cli("rho-solve --n 8 --m-z 8 --out " + out) == 2);
  CHECK(run_cli("bogus --out " + out) == 1);
  CHECK(run_cli("fixed-overlap-scan --J 3pi --out " + out + " --format yaml") == 1);
  CHECK(run_cli("rho-solve --n 8 --out " + out) == 1);
  CHECK(run_cli("fixed-overlap-scan --samples 200 --z-grid 3 --n 4") == 1);

  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"experiment": "rho-solve", "n": 6, "m_z": 1.5, "output": ")" << out
                     << R"("})";
  CHECK(run_cli("--config " + cfg.string() + " --m-z -2.5") == 0);
  std::ifstream meta_in(out + ".meta.json");
  const json meta = json::parse(meta_in);
  CHECK(meta["config"]["m_z"] == -2.5);
  CHECK(meta["config"]["n"] == 6);
  std::ofstream(cfg) << R"({"n": 6})";
  CHECK(run_cli("--config " + cfg.string() + " --out " + out) == 1);
  fs::remove_all(dir);
}
