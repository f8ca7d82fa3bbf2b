#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbcool/dynamics.hpp"
#include "fbcool/ensemble.hpp"
#include "fbcool/meanfield.hpp"
#include "fbcool/params.hpp"

namespace fbcool {

inline constexpr const char* tool_version = "0.1.0";
inline constexpr int run_format_version = 1;

// Bad or contradictory user input; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  GridSpec grid{512, 40.0};
  double alpha_tilde = 2.0;
  double eta = 6.0;
  KernelConfig kernel;  // kernel.w is the physics w
  ControlLaw control;
  double dt = 1e-3;
  double tau_max = 50.0;
  double sample_stride = 0.05;
  int paths = 100;
  std::uint64_t seed = 20260808;
  double init_center = 2.0;
  double init_sigma2 = 0.5;
  MeasurementRep rep = MeasurementRep::fourier;
  std::optional<PhysicalParams> physical;  // set when derived from SI inputs

  TrajectoryConfig trajectory() const;  // builds the kernel table
};

// Parses a config object, applying defaults for absent keys. Exactly one of
// "physics" {alpha_tilde, eta, w} or "physical" {SI fields} must be present.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);

nlohmann::json physical_to_json(const PhysicalParams& p);
PhysicalParams physical_from_json(const nlohmann::json& j);
nlohmann::json dimensionless_to_json(const DimensionlessParams& d);

nlohmann::json report_to_json(const ConvergenceReport& report);

nlohmann::json make_manifest(const RunConfig& config,
                             const EnsembleStats& stats,
                             const std::vector<TrajectoryRecord>& records);

// Run directory layout: manifest.json, stats.csv, paths/NNNN.csv.
void write_run_directory(const std::string& dir, const RunConfig& config,
                         const EnsembleStats& stats,
                         const std::vector<TrajectoryRecord>& records);

struct RunDirectory {
  nlohmann::json manifest;
  EnsembleStats stats;
  std::vector<TrajectoryRecord> records;
};

RunDirectory read_run_directory(const std::string& dir);

// Accepts either a bare config object or a manifest (replays its "config").
nlohmann::json load_config_json(const std::string& path);

}  // namespace fbcool
