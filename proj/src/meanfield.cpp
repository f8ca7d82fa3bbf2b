#include "fbcool/meanfield.hpp"

#include <cmath>
#include <stdexcept>

#include "fbcool/rng.hpp"

namespace fbcool {

namespace {

constexpr double amplitude_blowup = 1e6;
constexpr double norm_blowup = 1e3;

}  // namespace

double meanfield_norm(const MeanField& phi) {
  return std::sqrt(phi.amplitudes.abs2().sum() * phi.grid.dxi());
}

MeanFieldIntegrator::MeanFieldIntegrator(const GridSpec& grid,
                                         const MeanFieldParams& params,
                                         const ControlLaw& law)
    : core_(grid,
            DynamicsParams{params.alpha_tilde, params.eta, params.kernel,
                           params.dt, MeasurementRep::fourier},
            law),
      params_(params) {
  if (params_.alpha_tilde > 0.0) {
    decay_rate_ = 0.5 * params_.alpha_tilde * core_.family().m0_active;
    // The family rows carry sqrt(alpha~); the noise term wants
    // prefactor * sum_j sqrt(w_j gamma~_j) a_j(xi) dW_j.
    noise_scale_ = params_.prefactor == NoisePrefactor::as_printed
                       ? std::sqrt(params_.alpha_tilde)
                       : 1.0;
    field_.resize(grid.n_points);
  }
}

int MeanFieldIntegrator::n_noise_channels() const {
  return params_.alpha_tilde > 0.0 ? core_.family().n_nodes() : 0;
}

ControlSignal MeanFieldIntegrator::controls(const MeanField& phi, double tau) {
  return core_.controls(phi, tau);
}

bool MeanFieldIntegrator::step(MeanField& phi, const ControlSignal& controls,
                               const Eigen::Ref<const ArrayXr>& dW) {
  core_.build_control_phase(controls);
  apply_kinetic_phase(phi, core_.sp_, core_.kin_half_);
  apply_position_phase(phi, core_.pot_half_);
  if (params_.alpha_tilde > 0.0) {
    if (dW.size() != core_.family().n_nodes())
      throw std::invalid_argument("meanfield_step: noise size mismatch");
    field_ = (core_.family().L.transpose() * dW.matrix()).array() * noise_scale_;
    const double decay = decay_rate_ * params_.dt;
    for (int i = 0; i < phi.grid.n_points; ++i)
      phi.amplitudes[i] *= (1.0 - decay) + field_[i];
  }
  apply_position_phase(phi, core_.pot_half_);
  apply_kinetic_phase(phi, core_.sp_, core_.kin_half_);

  const double peak = phi.amplitudes.abs2().maxCoeff();
  if (!std::isfinite(peak) || peak > amplitude_blowup * amplitude_blowup)
    return false;
  if (meanfield_norm(phi) > norm_blowup) return false;
  return true;
}

void ProbeConfig::validate() const {
  grid.validate();
  if (dt_ladder.size() < 3)
    throw std::domain_error("probe: dt ladder needs at least 3 levels");
  for (std::size_t l = 0; l + 1 < dt_ladder.size(); ++l) {
    if (std::abs(dt_ladder[l] / dt_ladder[l + 1] - 2.0) > 1e-9)
      throw std::domain_error("probe: ladder must halve dt at each level");
  }
  if (!(dt_ladder.back() > 0.0)) throw std::domain_error("probe: dt must be > 0");
  const double steps = tau_horizon / dt_ladder.front();
  if (std::abs(steps - std::round(steps)) > 1e-9)
    throw std::domain_error("probe: horizon must be a multiple of the coarsest dt");
  const double snap = snapshot_stride / dt_ladder.front();
  if (std::abs(snap - std::round(snap)) > 1e-9 || std::round(snap) < 1.0)
    throw std::domain_error("probe: snapshot stride must be a multiple of the coarsest dt");
  if (n_paths < 1) throw std::domain_error("probe: n_paths must be >= 1");
}

namespace {

struct LevelRun {
  std::vector<ArrayXc> snapshots;
  bool diverged = false;
  double diverged_tau = -1.0;
  double end_norm = 1.0;
};

// Integrates one path at one ladder level, consuming the shared fine-step
// noise stream (coarse increments are blockwise sums of fine draws).
LevelRun run_level(const ProbeConfig& cfg, double dt, std::uint64_t path) {
  const double dt_fine = cfg.dt_ladder.back();
  const int fine_per_step = static_cast<int>(std::round(dt / dt_fine));
  const int steps = static_cast<int>(std::round(cfg.tau_horizon / dt));
  const int snap_every =
      static_cast<int>(std::round(cfg.snapshot_stride / dt));
  const double sqrt_dt_fine = std::sqrt(dt_fine);

  LevelRun out;
  RngStream stream(cfg.seed, path);
  MeanField phi = make_gaussian(cfg.grid, cfg.init_center, cfg.init_sigma2);

  if (cfg.target == ProbeTarget::mean_field) {
    MeanFieldParams mp{cfg.alpha_tilde, cfg.eta, cfg.kernel, dt, cfg.prefactor};
    MeanFieldIntegrator integ(cfg.grid, mp, cfg.law);
    ArrayXr dW = ArrayXr::Zero(integ.n_noise_channels());
    for (int k = 0; k < steps; ++k) {
      dW.setZero();
      for (int f = 0; f < fine_per_step; ++f)
        for (Eigen::Index r = 0; r < dW.size(); ++r)
          dW[r] += sqrt_dt_fine * stream.normal();
      const ControlSignal u = integ.controls(phi, k * dt);
      if (!integ.step(phi, u, dW)) {
        out.diverged = true;
        out.diverged_tau = (k + 1) * dt;
        break;
      }
      if ((k + 1) % snap_every == 0) out.snapshots.push_back(phi.amplitudes);
    }
  } else {
    DynamicsParams dp{cfg.alpha_tilde, cfg.eta, cfg.kernel, dt,
                      MeasurementRep::fourier};
    SseIntegrator integ(cfg.grid, dp, cfg.law);
    const int nodes = cfg.alpha_tilde > 0.0 ? integ.family().n_nodes() : 0;
    ArrayXr dW = ArrayXr::Zero(nodes);
    for (int k = 0; k < steps; ++k) {
      dW.setZero();
      for (int f = 0; f < fine_per_step; ++f)
        for (Eigen::Index r = 0; r < dW.size(); ++r)
          dW[r] += sqrt_dt_fine * stream.normal();
      const ControlSignal u = integ.controls(phi, k * dt);
      const StepInfo info = integ.step(phi, u, dW);
      if (info.collapsed) {
        out.diverged = true;
        out.diverged_tau = (k + 1) * dt;
        break;
      }
      if ((k + 1) % snap_every == 0) out.snapshots.push_back(phi.amplitudes);
    }
  }
  out.end_norm = meanfield_norm(phi);
  return out;
}

}  // namespace

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ConvergenceReport convergence_probe(const ProbeConfig& cfg) {
  cfg.validate();
  const std::size_t levels = cfg.dt_ladder.size();
  ConvergenceReport report;
  report.target = cfg.target;
  report.prefactor = cfg.prefactor;
  report.dt_ladder = cfg.dt_ladder;

  const double dxi = cfg.grid.dxi();
  std::vector<std::vector<double>> d_by_path(levels - 1);
  std::vector<double> scale_by_path;
  double norm_drift = 0.0;
  bool any_diverged = false;

  for (int p = 0; p < cfg.n_paths && !any_diverged; ++p) {
    std::vector<LevelRun> runs;
    runs.reserve(levels);
    for (std::size_t l = 0; l < levels; ++l)
      runs.push_back(run_level(cfg, cfg.dt_ladder[l], p));
    for (const auto& r : runs) {
      if (r.diverged) {
        any_diverged = true;
        if (report.diverged_tau < 0.0 || r.diverged_tau < report.diverged_tau)
          report.diverged_tau = r.diverged_tau;
      }
    }
    if (any_diverged) break;
    for (std::size_t l = 0; l + 1 < levels; ++l) {
      double dmax = 0.0;
      const std::size_t n_snap =
          std::min(runs[l].snapshots.size(), runs[l + 1].snapshots.size());
      for (std::size_t s = 0; s < n_snap; ++s) {
        const double d = std::sqrt(
            (runs[l].snapshots[s] - runs[l + 1].snapshots[s]).abs2().sum() *
            dxi);
        dmax = std::max(dmax, d);
      }
      d_by_path[l].push_back(dmax);
    }
    double path_scale = 0.0;
    for (const auto& s : runs.back().snapshots)
      path_scale = std::max(path_scale, std::sqrt(s.abs2().sum() * dxi));
    scale_by_path.push_back(path_scale);
    norm_drift += std::abs(runs.back().end_norm - 1.0) /
                  (cfg.tau_horizon * cfg.n_paths);
  }

  report.norm_drift_per_tau = norm_drift;
  if (any_diverged) {
    report.verdict = ProbeVerdict::diverged;
    return report;
  }

  report.distance.resize(levels - 1);
  for (std::size_t l = 0; l + 1 < levels; ++l)
    report.distance[l] = median(d_by_path[l]);
  report.solution_scale = std::max(1.0, median(scale_by_path));
  report.finest_relative = report.distance.back() / report.solution_scale;

  report.ratio.resize(report.distance.size() - 1);
  bool all_shrink = true;
  for (std::size_t l = 0; l + 1 < report.distance.size(); ++l) {
    report.ratio[l] = report.distance[l] / report.distance[l + 1];
    if (!(report.ratio[l] >= 1.3)) all_shrink = false;
  }
  const double overall = report.distance.front() / report.distance.back();
  report.geometric_mean_ratio =
      std::pow(overall, 1.0 / static_cast<double>(report.ratio.size()));

  // Converging needs every halving to shrink D by 1.3 AND the finest pair to
  // actually agree on the scale of the solution. Without the second clause a
  // blow-up that merely blows up faster at coarse dt reads as "converging"
  // while successive refinements still disagree at the few-percent level.
  const bool agrees =
      report.finest_relative <= probe_agreement_limit ||
      report.distance.back() < 1e-14 * report.solution_scale;
  report.verdict = (all_shrink || report.distance.back() == 0.0) && agrees
                       ? ProbeVerdict::converging
                       : ProbeVerdict::non_converging;
  return report;
}

}  // namespace fbcool
