#include "fbcool/validate.hpp"

#include <cmath>
#include <sstream>

#include "fbcool/dynamics.hpp"
#include "fbcool/ensemble.hpp"
#include "fbcool/kernels.hpp"
#include "fbcool/noise.hpp"
#include "fbcool/rng.hpp"

namespace fbcool {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

std::vector<CheckResult> noise_statistics_checks(std::uint64_t seed,
                                                 int steps) {
  std::vector<CheckResult> out;
  const ArrayXr kappa = ArrayXr::LinSpaced(33, -1.0, 1.0);
  const double dkappa = kappa[1] - kappa[0];
  const double dt = 1e-3;
  RngStream stream(seed, 0);

  bool hermitian_exact = true;
  const int i_k = 20, i_other = 26;
  double auto_sum = 0.0;
  Complex same_sum = 0.0, cross_sum = 0.0;
  for (int s = 0; s < steps; ++s) {
    const SpectralNoise sn = sample_spectral_noise(kappa, dt, stream);
    for (int i = 0; i < 33; ++i)
      if (sn.values[i] != std::conj(sn.values[32 - i])) hermitian_exact = false;
    auto_sum += std::norm(sn.values[i_k]);
    same_sum += sn.values[i_k] * sn.values[i_k];
    cross_sum += sn.values[i_k] * sn.values[i_other];
  }
  out.push_back({"noise.hermitian_symmetry", hermitian_exact,
                 hermitian_exact ? "exact" : "violated"});

  const double expected = dt / dkappa;
  const double auto_rel = std::abs(auto_sum / steps - expected) / expected;
  out.push_back({"noise.autocorrelation_2pct", auto_rel < 0.02,
                 "relative deviation " + fmt(auto_rel)});

  const double bound = 4.0 * expected / std::sqrt(double(steps));
  const double same = std::max(std::abs(same_sum.real()), std::abs(same_sum.imag())) / steps;
  const double cross = std::max(std::abs(cross_sum.real()), std::abs(cross_sum.imag())) / steps;
  out.push_back({"noise.same_kappa_cross_term_4sigma", same < bound,
                 fmt(same) + " vs bound " + fmt(bound)});
  out.push_back({"noise.distinct_kappa_cross_term_4sigma", cross < bound,
                 fmt(cross) + " vs bound " + fmt(bound)});
  return out;
}

std::vector<CheckResult> kernel_checks() {
  std::vector<CheckResult> out;
  KernelConfig gauss_cfg;
  gauss_cfg.w = 3000.0;
  gauss_cfg.n_kappa = 64;
  gauss_cfg.quad_tol = 1e-10;
  KernelConfig full_cfg = gauss_cfg;
  full_cfg.method = KernelMethod::full;

  const KernelTable tg = tabulate_kernel(gauss_cfg);
  const KernelTable tf = tabulate_kernel(full_cfg);

  bool even = true, positive = true;
  for (int i = 0; i < tg.n_points(); ++i) {
    if (tg.gamma[i] != tg.gamma[tg.n_points() - 1 - i]) even = false;
    if (tg.gamma[i] < 0.0 || tf.gamma[i] < 0.0) positive = false;
  }
  out.push_back({"kernel.evenness", even, even ? "exact" : "violated"});
  out.push_back({"kernel.positivity", positive, positive ? "ok" : "violated"});

  const double peak = tg.gamma.maxCoeff();
  double worst = 0.0;
  for (int i = 0; i < tg.n_points(); ++i)
    if (std::abs(tg.kappa[i]) <= 0.5)
      worst = std::max(worst, std::abs(tf.gamma[i] - tg.gamma[i]) / peak);
  out.push_back({"kernel.full_vs_gaussian_5pct", worst < 0.05,
                 "peak-relative deviation " + fmt(worst)});

  KernelConfig coarse = gauss_cfg;
  coarse.quad_tol = 1e-6;
  KernelConfig fine = gauss_cfg;
  fine.quad_tol = 5e-7;
  const KernelTable tc = tabulate_kernel(coarse);
  const KernelTable tfine = tabulate_kernel(fine);
  double worst_rel = 0.0;
  for (int i = 0; i < tc.n_points(); ++i) {
    const double scale = std::max(std::abs(tfine.gamma[i]), 1e-30);
    worst_rel = std::max(worst_rel, std::abs(tc.gamma[i] - tfine.gamma[i]) / scale);
  }
  out.push_back({"kernel.self_convergence", worst_rel < 1e-6,
                 "max change " + fmt(worst_rel) + " under tolerance halving"});
  return out;
}

std::vector<CheckResult> unravelling_checks(int paths, int workers,
                                            std::uint64_t seed) {
  std::vector<CheckResult> out;
  KernelConfig kc;
  kc.w = 3000.0;
  kc.n_kappa = 64;
  kc.quad_tol = 1e-10;
  const KernelTable table = tabulate_kernel(kc);

  TrajectoryConfig cfg;
  cfg.grid = GridSpec{32, 12.0};
  cfg.dynamics = DynamicsParams{1.0, 2.0, table, 1e-3, MeasurementRep::fourier};
  cfg.law = ControlLaw{};
  cfg.tau_max = 1.0;
  cfg.sample_stride = 0.05;
  cfg.init_center = 1.0;
  cfg.init_sigma2 = 0.5;
  cfg.seed = seed;

  auto [stats, records] = run_ensemble(cfg, paths, workers);
  const TrajectoryRecord sme = run_sme_deterministic(cfg);

  for (double tau : {0.5, 1.0}) {
    const int idx = static_cast<int>(std::round(tau / cfg.sample_stride));
    // cross-path standard errors for x, p, energy at this sample
    double mx = 0.0, mp = 0.0, me = 0.0;
    int n = 0;
    for (const auto& r : records) {
      if (r.status != PathStatus::completed) continue;
      mx += r.x[idx];
      mp += r.p[idx];
      me += r.energy[idx];
      ++n;
    }
    mx /= n;
    mp /= n;
    me /= n;
    double vx = 0.0, vp = 0.0, ve = 0.0;
    for (const auto& r : records) {
      if (r.status != PathStatus::completed) continue;
      vx += (r.x[idx] - mx) * (r.x[idx] - mx);
      vp += (r.p[idx] - mp) * (r.p[idx] - mp);
      ve += (r.energy[idx] - me) * (r.energy[idx] - me);
    }
    const double sx = std::sqrt(vx / (n - 1.0) / n);
    const double sp = std::sqrt(vp / (n - 1.0) / n);
    const double se = std::sqrt(ve / (n - 1.0) / n);

    const double zx = std::abs(mx - sme.x[idx]) / sx;
    const double zp = std::abs(mp - sme.p[idx]) / sp;
    const double ze = std::abs(me - sme.energy[idx]) / se;
    out.push_back({"unravelling.x_tau" + fmt(tau), zx < 3.0, "z = " + fmt(zx)});
    out.push_back({"unravelling.p_tau" + fmt(tau), zp < 3.0, "z = " + fmt(zp)});
    out.push_back(
        {"unravelling.energy_tau" + fmt(tau), ze < 3.0, "z = " + fmt(ze)});
  }
  return out;
}

}  // namespace fbcool
