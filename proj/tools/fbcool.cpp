// Command-line front end for the feedback-cooling simulator.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbcool/config.hpp"
#include "fbcool/csv.hpp"
#include "fbcool/ensemble.hpp"
#include "fbcool/figures.hpp"
#include "fbcool/svgplot.hpp"
#include "fbcool/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fbcool;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation_failure = 1;
constexpr int exit_config_error = 2;
constexpr int exit_runtime_failure = 3;

int default_workers() {
  if (const char* env = std::getenv("FBCOOL_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

json read_json_arg(const std::string& path) {
  if (path == "-") {
    json j;
    std::cin >> j;
    return j;
  }
  return load_config_json(path);
}

int cmd_params(const std::string& in_path) {
  const json j = read_json_arg(in_path);
  const PhysicalParams phys = physical_from_json(j);
  json out = dimensionless_to_json(derive_dimensionless(phys));
  out["warnings"] = validate_regime(phys);
  std::cout << out.dump(2) << '\n';
  return exit_ok;
}

int cmd_kernel(const KernelConfig& cfg, const std::string& out_path) {
  const KernelTable table = tabulate_kernel(cfg);
  if (out_path.empty() || out_path == "-") {
    write_kernel_csv(std::cout, table);
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + out_path);
    write_kernel_csv(f, table);
  }
  return exit_ok;
}

int cmd_trajectory(const std::string& config_path, int index,
                   const std::string& out_path) {
  const RunConfig config = config_from_json(load_config_json(config_path));
  const TrajectoryRecord rec = run_trajectory(config.trajectory(), index);
  if (out_path.empty() || out_path == "-") {
    write_path_csv(std::cout, rec);
  } else {
    std::ofstream f(out_path, std::ios::binary);
    write_path_csv(f, rec);
  }
  if (rec.status != PathStatus::completed) {
    std::cerr << "trajectory " << index << ": " << rec.failure_reason << '\n';
    return exit_runtime_failure;
  }
  return exit_ok;
}

int run_one_ensemble(const RunConfig& config, const std::string& out_dir,
                     int workers) {
  auto [stats, records] = run_ensemble(config.trajectory(), config.paths, workers);
  write_run_directory(out_dir, config, stats, records);
  json extra;
  try {
    const SteadyStateSummary ss = steady_state(stats);
    extra["steady_state"] = {{"reached", ss.reached},
                             {"tau_onset", ss.tau_onset},
                             {"energy", ss.energy},
                             {"energy_stderr", ss.energy_stderr}};
  } catch (const std::domain_error& e) {
    extra["steady_state"] = {{"reached", false}, {"note", e.what()}};
  }
  std::ofstream f(fs::path(out_dir) / "steady_state.json");
  f << extra.dump(2) << '\n';
  if (!stats.valid) {
    std::cerr << "run invalid: " << stats.invalid_reason << '\n';
    return exit_runtime_failure;
  }
  return exit_ok;
}

int cmd_figure(const std::string& preset_name, const std::string& scale_name,
               const std::string& out_dir, bool data_only, std::uint64_t seed,
               int workers) {
  const FigurePreset preset = figure_preset_from_name(preset_name);
  if (scale_name != "full" && scale_name != "desk")
    throw ConfigError("figure scale must be full or desk");
  const FigureScale scale =
      scale_name == "full" ? FigureScale::full : FigureScale::desk;
  const auto series = figure_series(preset, scale, seed);

  std::vector<PlotSeries> plot;
  json summary;
  summary["preset"] = preset_name;
  summary["scale"] = scale_name;
  json series_summary = json::array();
  int status = exit_ok;
  for (const auto& s : series) {
    std::string dir = s.label;
    for (auto& c : dir)
      if (c == ',' || c == '^' || c == '=') c = '_';
    const std::string run_dir = (fs::path(out_dir) / dir).string();
    std::cerr << "series " << s.label << " -> " << run_dir << '\n';
    auto [stats, records] =
        run_ensemble(s.config.trajectory(), s.config.paths, workers);
    write_run_directory(run_dir, s.config, stats, records);
    // wide window: ensemble means of stationary noisy plateaus wander on
    // multi-tau scales, which short windows misread as drift
    const SteadyStateSummary ss = steady_state(stats, 10.0, 0.02);
    json row;
    row["label"] = s.label;
    row["paths"] = s.config.paths;
    row["steady_state"] = {{"reached", ss.reached},
                           {"tau_onset", ss.tau_onset},
                           {"energy", ss.energy},
                           {"energy_stderr", ss.energy_stderr}};
    if (!stats.valid) {
      row["invalid_reason"] = stats.invalid_reason;
      status = exit_runtime_failure;
    }
    series_summary.push_back(row);
    plot.push_back({s.label, stats.tau, stats.mean_energy, stats.stderr_energy});
  }
  summary["series"] = series_summary;
  fs::create_directories(out_dir);
  {
    std::ofstream f(fs::path(out_dir) / "summary.json");
    f << summary.dump(2) << '\n';
  }
  if (!data_only) {
    PlotSpec spec;
    spec.title = preset_name + std::string(" (") + scale_name + ")";
    std::ofstream f(fs::path(out_dir) / (preset_name + std::string(".svg")),
                    std::ios::binary);
    write_svg_plot(f, spec, plot);
  }
  return status;
}

int cmd_validate(int paths, int workers, std::uint64_t seed) {
  std::vector<CheckResult> checks;
  for (auto& c : kernel_checks()) checks.push_back(c);
  for (auto& c : noise_statistics_checks(seed)) checks.push_back(c);
  for (auto& c : unravelling_checks(paths, workers, seed)) checks.push_back(c);
  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail
              << '\n';
    all &= c.pass;
  }
  return all ? exit_ok : exit_validation_failure;
}

int cmd_meanfield(const std::string& config_path, const std::string& prefactor,
                  const std::string& target, const std::string& out_path,
                  double tau_horizon, int paths) {
  ProbeConfig pc;
  KernelConfig kc;
  kc.w = 3000.0;
  kc.quad_tol = 1e-10;
  pc.law.c = {2.0, 0.0, 0.0, 0.0};
  if (!config_path.empty()) {
    const RunConfig rc = config_from_json(load_config_json(config_path));
    pc.grid = rc.grid;
    pc.alpha_tilde = rc.alpha_tilde;
    pc.eta = rc.eta;
    pc.law = rc.control;
    pc.seed = rc.seed;
    kc = rc.kernel;
  }
  pc.kernel = tabulate_kernel(kc);
  pc.tau_horizon = tau_horizon;
  pc.n_paths = paths;
  if (prefactor != "printed" && prefactor != "sqrt")
    throw ConfigError("meanfield prefactor must be printed or sqrt");
  if (target != "meanfield" && target != "sse")
    throw ConfigError("meanfield target must be meanfield or sse");
  pc.prefactor = prefactor == "sqrt" ? NoisePrefactor::sqrt_alpha
                                     : NoisePrefactor::as_printed;
  pc.target = target == "sse" ? ProbeTarget::single_atom_sse
                              : ProbeTarget::mean_field;
  const ConvergenceReport report = convergence_probe(pc);
  const json j = report_to_json(report);
  if (out_path.empty() || out_path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream f(out_path);
    f << j.dump(2) << '\n';
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous-measurement feedback cooling simulator"};
  app.require_subcommand(1);

  std::string in_path = "-";
  auto* params_cmd = app.add_subcommand(
      "params", "derive dimensionless parameters from SI inputs (JSON)");
  params_cmd->add_option("--in", in_path, "input JSON file or '-' for stdin");

  KernelConfig kernel_cfg;
  std::string kernel_method = "gaussian";
  std::string kernel_out;
  auto* kernel_cmd =
      app.add_subcommand("kernel", "tabulate the measurement spectrum as CSV");
  kernel_cmd->add_option("--w", kernel_cfg.w, "w = k0^2 z0^2 / 2");
  kernel_cmd->add_option("--method", kernel_method, "gaussian|full");
  kernel_cmd->add_option("--n-kappa", kernel_cfg.n_kappa, "grid intervals");
  kernel_cmd->add_option("--quad-tol", kernel_cfg.quad_tol,
                         "quadrature tolerance");
  kernel_cmd->add_option("--out", kernel_out, "output file (default stdout)");

  std::string config_path;
  std::string out_path;
  int traj_index = 0;
  auto* traj_cmd =
      app.add_subcommand("trajectory", "run a single stochastic path");
  traj_cmd->add_option("--config", config_path, "run config JSON")->required();
  traj_cmd->add_option("--index", traj_index, "trajectory index");
  traj_cmd->add_option("--out", out_path, "output CSV (default stdout)");

  std::string ens_config, ens_out = "run";
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int workers = default_workers();
  auto* ens_cmd = app.add_subcommand("ensemble", "run a trajectory ensemble");
  ens_cmd->add_option("--config", ens_config, "run config JSON (or manifest)")
      ->required();
  ens_cmd->add_option("--out", ens_out, "output directory");
  auto* seed_opt =
      ens_cmd->add_option("--seed", seed_override, "master seed override");
  ens_cmd->add_option("--workers", workers, "worker thread cap");

  int val_paths = 1000;
  std::uint64_t val_seed = 20260808;
  auto* val_cmd = app.add_subcommand(
      "validate", "run the unravelling / noise / kernel validation suite");
  val_cmd->add_option("--paths", val_paths, "SSE ensemble size");
  val_cmd->add_option("--workers", workers, "worker thread cap");
  val_cmd->add_option("--seed", val_seed, "master seed");

  std::string mf_config, mf_prefactor = "printed", mf_target = "meanfield",
              mf_out;
  double mf_tau = 5.0;
  int mf_paths = 4;
  auto* mf_cmd = app.add_subcommand(
      "meanfield",
      "step-refinement convergence probe for the mean-field filter");
  mf_cmd->add_option("--config", mf_config, "run config JSON for physics block");
  mf_cmd->add_option("--prefactor", mf_prefactor, "printed|sqrt noise prefactor");
  mf_cmd->add_option("--target", mf_target, "meanfield|sse");
  mf_cmd->add_option("--tau", mf_tau, "probe horizon");
  mf_cmd->add_option("--paths", mf_paths, "matched-noise paths");
  mf_cmd->add_option("--out", mf_out, "report JSON path (default stdout)");

  std::string fig_preset, fig_scale = "desk", fig_out = "figure";
  bool data_only = false;
  std::uint64_t fig_seed = 20260808;
  auto* fig_cmd = app.add_subcommand("figure", "run an experiment preset");
  fig_cmd->add_option("preset", fig_preset, "fig2|fig3|fig4")->required();
  fig_cmd->add_option("--scale", fig_scale, "full|desk");
  fig_cmd->add_option("--out", fig_out, "output directory");
  fig_cmd->add_flag("--data-only", data_only, "skip SVG emission");
  fig_cmd->add_option("--seed", fig_seed, "base seed");
  fig_cmd->add_option("--workers", workers, "worker thread cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config_error;
  }

  try {
    if (params_cmd->parsed()) return cmd_params(in_path);
    if (kernel_cmd->parsed()) {
      if (kernel_method == "full") kernel_cfg.method = KernelMethod::full;
      else if (kernel_method == "gaussian") kernel_cfg.method = KernelMethod::gaussian;
      else throw ConfigError("kernel method must be gaussian or full");
      return cmd_kernel(kernel_cfg, kernel_out);
    }
    if (traj_cmd->parsed())
      return cmd_trajectory(config_path, traj_index, out_path);
    if (ens_cmd->parsed()) {
      RunConfig config = config_from_json(load_config_json(ens_config));
      if (seed_opt->count() > 0) config.seed = seed_override;
      return run_one_ensemble(config, ens_out, workers);
    }
    if (val_cmd->parsed()) return cmd_validate(val_paths, workers, val_seed);
    if (mf_cmd->parsed())
      return cmd_meanfield(mf_config, mf_prefactor, mf_target, mf_out, mf_tau,
                           mf_paths);
    if (fig_cmd->parsed())
      return cmd_figure(fig_preset, fig_scale, fig_out, data_only, fig_seed,
                        workers);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime_failure;
  }
  return exit_ok;
}
