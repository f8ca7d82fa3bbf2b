#include "fbcool/config.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fbcool {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

const json& require_object(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_object())
    throw ConfigError(std::string("config: missing object '") + key + "'");
  return j.at(key);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

const char* status_name(PathStatus s) {
  switch (s) {
    case PathStatus::completed: return "completed";
    case PathStatus::overflowed: return "overflowed";
    case PathStatus::failed: return "failed";
  }
  return "unknown";
}

PathStatus status_from_name(const std::string& s) {
  if (s == "completed") return PathStatus::completed;
  if (s == "overflowed") return PathStatus::overflowed;
  if (s == "failed") return PathStatus::failed;
  throw ConfigError("manifest: unknown path status '" + s + "'");
}

}  // namespace

TrajectoryConfig RunConfig::trajectory() const {
  TrajectoryConfig t;
  t.grid = grid;
  t.dynamics.alpha_tilde = alpha_tilde;
  t.dynamics.eta = eta;
  t.dynamics.kernel = tabulate_kernel(kernel);
  t.dynamics.dt = dt;
  t.dynamics.rep = rep;
  t.law = control;
  t.tau_max = tau_max;
  t.sample_stride = sample_stride;
  t.init_center = init_center;
  t.init_sigma2 = init_sigma2;
  t.seed = seed;
  return t;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    c.grid.n_points = get_or<int>(g, "n_points", c.grid.n_points);
    c.grid.length = get_or<double>(g, "length", c.grid.length);
  }

  const bool has_physics = j.contains("physics");
  const bool has_physical = j.contains("physical");
  if (has_physics == has_physical)
    throw ConfigError(
        "config: exactly one of 'physics' (dimensionless) or 'physical' (SI) "
        "must be present");
  if (has_physics) {
    const json& p = require_object(j, "physics");
    c.alpha_tilde = get_or<double>(p, "alpha_tilde", c.alpha_tilde);
    c.eta = get_or<double>(p, "eta", c.eta);
    c.kernel.w = get_or<double>(p, "w", c.kernel.w);
  } else {
    const json& p = require_object(j, "physical");
    c.physical = physical_from_json(p);
    const DimensionlessParams d = derive_dimensionless(*c.physical);
    c.alpha_tilde = d.alpha_tilde;
    c.eta = d.eta;
    c.kernel.w = d.w;
  }

  if (j.contains("control")) {
    const json& ctl = j.at("control");
    c.control.c[0] = get_or<double>(ctl, "c1", 0.0);
    c.control.c[1] = get_or<double>(ctl, "c2", 0.0);
    c.control.c[2] = get_or<double>(ctl, "c3", 0.0);
    c.control.c[3] = get_or<double>(ctl, "c4", 0.0);
  }

  if (j.contains("integration")) {
    const json& it = j.at("integration");
    c.dt = get_or<double>(it, "dt", c.dt);
    c.tau_max = get_or<double>(it, "tau_max", c.tau_max);
    c.sample_stride = get_or<double>(it, "sample_stride", c.sample_stride);
  }

  if (j.contains("ensemble")) {
    const json& e = j.at("ensemble");
    c.paths = get_or<int>(e, "paths", c.paths);
    c.seed = get_or<std::uint64_t>(e, "seed", c.seed);
  }

  if (j.contains("initial_state")) {
    const json& s = j.at("initial_state");
    c.init_center = get_or<double>(s, "center", c.init_center);
    c.init_sigma2 = get_or<double>(s, "sigma2", c.init_sigma2);
  }

  if (j.contains("kernel")) {
    const json& k = j.at("kernel");
    const std::string method = get_or<std::string>(k, "method", "gaussian");
    if (method == "gaussian") c.kernel.method = KernelMethod::gaussian;
    else if (method == "full") c.kernel.method = KernelMethod::full;
    else throw ConfigError("config: kernel.method must be 'gaussian' or 'full'");
    c.kernel.n_kappa = get_or<int>(k, "n_kappa", c.kernel.n_kappa);
    c.kernel.quad_tol = get_or<double>(k, "quad_tol", c.kernel.quad_tol);
  }

  const std::string rep = get_or<std::string>(j, "measurement_rep", "fourier");
  if (rep == "fourier") c.rep = MeasurementRep::fourier;
  else if (rep == "real_space") c.rep = MeasurementRep::real_space;
  else throw ConfigError("config: measurement_rep must be 'fourier' or 'real_space'");

  // Enforce module-level invariants at load time.
  try {
    c.grid.validate();
    c.kernel.validate();
    c.control.validate();
    TrajectoryConfig probe = c.trajectory();
    probe.dynamics.kernel = KernelTable{};  // skip the tabulation cost here
    probe.dynamics.kernel.kappa = ArrayXr::LinSpaced(3, -1, 1);
    probe.dynamics.kernel.gamma = ArrayXr::Zero(3);
    probe.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.paths < 2) throw ConfigError("config: ensemble.paths must be >= 2");
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["grid"] = {{"n_points", c.grid.n_points}, {"length", c.grid.length}};
  if (c.physical) j["physical"] = physical_to_json(*c.physical);
  else
    j["physics"] = {{"alpha_tilde", c.alpha_tilde},
                    {"eta", c.eta},
                    {"w", c.kernel.w}};
  j["control"] = {{"c1", c.control.c[0]},
                  {"c2", c.control.c[1]},
                  {"c3", c.control.c[2]},
                  {"c4", c.control.c[3]}};
  j["integration"] = {{"dt", c.dt},
                      {"tau_max", c.tau_max},
                      {"sample_stride", c.sample_stride}};
  j["ensemble"] = {{"paths", c.paths}, {"seed", c.seed}};
  j["initial_state"] = {{"center", c.init_center}, {"sigma2", c.init_sigma2}};
  j["kernel"] = {
      {"method", c.kernel.method == KernelMethod::gaussian ? "gaussian" : "full"},
      {"n_kappa", c.kernel.n_kappa},
      {"quad_tol", c.kernel.quad_tol}};
  j["measurement_rep"] =
      c.rep == MeasurementRep::fourier ? "fourier" : "real_space";
  return j;
}

PhysicalParams physical_from_json(const json& j) {
  PhysicalParams p;
  auto need = [&j](const char* key) {
    if (!j.contains(key))
      throw ConfigError(std::string("physical params: missing '") + key + "'");
    return j.at(key).get<double>();
  };
  p.dipole = need("dipole");
  p.k0 = need("k0");
  p.omega_t = need("omega_t");
  p.omega_z = need("omega_z");
  p.delta = need("delta");
  p.flux = need("flux");
  p.mass = need("mass");
  return p;
}

json physical_to_json(const PhysicalParams& p) {
  return json{{"dipole", p.dipole}, {"k0", p.k0},       {"omega_t", p.omega_t},
              {"omega_z", p.omega_z}, {"delta", p.delta}, {"flux", p.flux},
              {"mass", p.mass}};
}

json dimensionless_to_json(const DimensionlessParams& d) {
  return json{{"alpha", d.alpha},
              {"alpha_tilde", d.alpha_tilde},
              {"eta", d.eta},
              {"w", d.w},
              {"x0", d.x0},
              {"z0", d.z0},
              {"gamma_sp", d.gamma_sp},
              {"omega_rabi", d.omega_rabi}};
}

json report_to_json(const ConvergenceReport& r) {
  json j;
  j["target"] =
      r.target == ProbeTarget::mean_field ? "mean_field" : "single_atom_sse";
  j["noise_prefactor"] =
      r.prefactor == NoisePrefactor::as_printed ? "alpha_tilde" : "sqrt_alpha_tilde";
  j["dt_ladder"] = r.dt_ladder;
  j["distance"] = r.distance;
  j["ratio"] = r.ratio;
  j["geometric_mean_ratio"] = r.geometric_mean_ratio;
  j["solution_scale"] = r.solution_scale;
  j["finest_relative"] = r.finest_relative;
  j["norm_drift_per_tau"] = r.norm_drift_per_tau;
  switch (r.verdict) {
    case ProbeVerdict::converging: j["verdict"] = "converging"; break;
    case ProbeVerdict::non_converging: j["verdict"] = "non-converging"; break;
    case ProbeVerdict::diverged: j["verdict"] = "diverged"; break;
  }
  if (r.diverged_tau >= 0.0) j["diverged_tau"] = r.diverged_tau;
  return j;
}

json make_manifest(const RunConfig& config, const EnsembleStats& stats,
                   const std::vector<TrajectoryRecord>& records) {
  json m;
  m["format_version"] = run_format_version;
  m["tool_version"] = tool_version;
  m["created_utc"] = utc_timestamp();
  m["seed"] = config.seed;
  m["config"] = config_to_json(config);
  m["paths_requested"] = stats.n_requested;
  m["paths_completed"] = stats.n_completed;
  m["paths_overflowed"] = stats.n_overflowed;
  m["paths_failed"] = stats.n_failed;
  m["valid"] = stats.valid;
  if (!stats.valid) m["invalid_reason"] = stats.invalid_reason;
  json paths = json::array();
  for (const auto& rec : records) {
    json p;
    p["index"] = rec.index;
    p["status"] = status_name(rec.status);
    if (!rec.failure_reason.empty()) p["failure_reason"] = rec.failure_reason;
    paths.push_back(p);
  }
  m["paths"] = paths;
  return m;
}

void write_run_directory(const std::string& dir, const RunConfig& config,
                         const EnsembleStats& stats,
                         const std::vector<TrajectoryRecord>& records) {
  fs::create_directories(fs::path(dir) / "paths");
  {
    std::ofstream f(fs::path(dir) / "manifest.json");
    f << make_manifest(config, stats, records).dump(2) << '\n';
  }
  {
    std::ofstream f(fs::path(dir) / "stats.csv", std::ios::binary);
    write_stats_csv(f, stats);
  }
  char name[16];
  for (const auto& rec : records) {
    std::snprintf(name, sizeof(name), "%04llu.csv",
                  static_cast<unsigned long long>(rec.index));
    std::ofstream f(fs::path(dir) / "paths" / name, std::ios::binary);
    write_path_csv(f, rec);
  }
}

RunDirectory read_run_directory(const std::string& dir) {
  RunDirectory out;
  {
    std::ifstream f(fs::path(dir) / "manifest.json");
    if (!f) throw ConfigError("run directory: missing manifest.json");
    f >> out.manifest;
  }
  const int version = out.manifest.value("format_version", -1);
  if (version != run_format_version)
    throw ConfigError("run directory: unsupported format_version " +
                      std::to_string(version));
  {
    std::ifstream f(fs::path(dir) / "stats.csv", std::ios::binary);
    if (!f) throw ConfigError("run directory: missing stats.csv");
    read_stats_csv(f, out.stats);
  }
  out.stats.n_requested = out.manifest.value("paths_requested", 0);
  out.stats.n_completed = out.manifest.value("paths_completed", 0);
  out.stats.n_overflowed = out.manifest.value("paths_overflowed", 0);
  out.stats.n_failed = out.manifest.value("paths_failed", 0);
  out.stats.valid = out.manifest.value("valid", true);
  if (out.manifest.contains("invalid_reason"))
    out.stats.invalid_reason = out.manifest["invalid_reason"];

  const std::uint64_t seed = out.manifest.value("seed", std::uint64_t{0});
  char name[16];
  for (const auto& entry : out.manifest.at("paths")) {
    TrajectoryRecord rec;
    rec.index = entry.at("index").get<std::uint64_t>();
    rec.master_seed = seed;
    rec.status = status_from_name(entry.at("status").get<std::string>());
    if (entry.contains("failure_reason"))
      rec.failure_reason = entry["failure_reason"];
    std::snprintf(name, sizeof(name), "%04llu.csv",
                  static_cast<unsigned long long>(rec.index));
    std::ifstream f(fs::path(dir) / "paths" / name, std::ios::binary);
    if (!f)
      throw ConfigError(std::string("run directory: missing paths/") + name);
    read_path_csv(f, rec);
    out.records.push_back(std::move(rec));
  }
  return out;
}

json load_config_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  if (j.contains("format_version") && j.contains("config")) return j["config"];
  return j;
}

}  // namespace fbcool
