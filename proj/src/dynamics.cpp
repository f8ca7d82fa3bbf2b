#include "fbcool/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "fbcool/rng.hpp"

namespace fbcool {

namespace {

constexpr double norm_collapse_limit = 1e-6;
constexpr double node_trim_rel = 1e-14;

// Simpson weights coeff * h / 3 on the uniform table grid.
ArrayXr simpson_weights(const KernelTable& table) {
  const int m = table.n_points();
  const double h = table.dkappa();
  ArrayXr w(m);
  for (int i = 0; i < m; ++i)
    w[i] = ((i == 0 || i == m - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0)) * h / 3.0;
  return w;
}

// Unnormalized moment helpers shared by the control predictor. For the SSE
// the state is kept at unit norm, so these agree with the checked versions;
// the mean-field integrator reuses them on a drifting-norm field.
double raw_x_power(const Wavefunction& psi, int n) {
  return (psi.amplitudes.abs2() * psi.grid.xi().pow(n)).sum() * psi.grid.dxi();
}

double raw_p(const Wavefunction& psi, const Spectral& sp, ArrayXc& scratch) {
  scratch = psi.amplitudes;
  sp.forward(scratch);
  const ArrayXr k = psi.grid.k_fft();
  return (scratch.abs2() * k).sum() * psi.grid.dxi() / psi.grid.n_points;
}

// u_n = c_n (n/2) <p x^{n-1} + x^{n-1} p> with one spectral-derivative pass.
ControlSignal raw_controls(const Wavefunction& psi, const Spectral& sp,
                           const ControlLaw& law, double tau,
                           ArrayXc& scratch) {
  ControlSignal signal;
  signal.tau = tau;
  const int top = law.highest_order();
  if (top == 0) return signal;
  scratch = psi.amplitudes;
  sp.forward(scratch);
  scratch *= psi.grid.k_fft();
  sp.inverse(scratch);  // (p psi)(xi)
  const ArrayXr xi = psi.grid.xi();
  ArrayXr xpow = ArrayXr::Ones(psi.grid.n_points);
  for (int n = 1; n <= top; ++n) {
    if (n > 1) xpow *= xi;
    if (law.c[n - 1] == 0.0) continue;
    const Complex overlap =
        (psi.amplitudes.conjugate() * xpow.cast<Complex>() * scratch).sum() *
        psi.grid.dxi();
    signal.u[n - 1] = law.c[n - 1] * (0.5 * n) * 2.0 * overlap.real();
  }
  return signal;
}

}  // namespace

void DynamicsParams::validate() const {
  if (!(dt > 0.0)) throw std::domain_error("dynamics: dt must be > 0");
  if (!(alpha_tilde >= 0.0))
    throw std::domain_error("dynamics: alpha_tilde must be >= 0");
  if (!(eta > 0.0)) throw std::domain_error("dynamics: eta must be > 0");
  if (kernel.n_points() < 3)
    throw std::domain_error("dynamics: kernel table is empty");
}

MeasurementFamily make_measurement_family(const DynamicsParams& params,
                                          const GridSpec& grid) {
  params.validate();
  grid.validate();
  MeasurementFamily fam;
  fam.rep = params.rep;
  fam.m0 = kernel_moment(params.kernel, 0);
  fam.m2 = kernel_moment(params.kernel, 2);
  const ArrayXr xi = grid.xi();
  const int n_grid = grid.n_points;

  if (params.rep == MeasurementRep::fourier) {
    const ArrayXr w = simpson_weights(params.kernel);
    const ArrayXr wg = w * params.kernel.gamma;
    const double peak = wg.maxCoeff();
    std::vector<int> keep;
    for (int j = 0; j < params.kernel.n_points(); ++j)
      if (wg[j] >= node_trim_rel * peak) keep.push_back(j);
    const int n_nodes = static_cast<int>(keep.size());
    fam.node_index = keep;
    fam.node_kappa.resize(n_nodes);
    fam.L.resize(n_nodes, n_grid);
    for (int r = 0; r < n_nodes; ++r) {
      const int j = keep[r];
      const double kap = params.kernel.kappa[j];
      fam.node_kappa[r] = kap;
      fam.m0_active += wg[j];
      const double amp =
          -std::sqrt(params.alpha_tilde * w[j] * params.kernel.gamma[j]);
      for (int i = 0; i < n_grid; ++i) {
        const double phase = params.eta * kap * xi[i];
        fam.L(r, i) = amp * (std::cos(phase) + std::sin(phase));
      }
    }
  } else {
    // Gamma~ sampled at periodically wrapped grid differences.
    ArrayXr diff(n_grid);
    for (int m = 0; m < n_grid; ++m) {
      const int signed_m = (m <= n_grid / 2) ? m : m - n_grid;
      diff[m] = signed_m * grid.dxi();
    }
    const ArrayXr g = kernel_realspace(params.kernel, params.eta, diff);
    const double alpha_rs = params.alpha_tilde * 8.0 * pi / 3.0;
    const double amp = std::sqrt(alpha_rs * grid.dxi());
    fam.m0_active = fam.m0;
    fam.L.resize(n_grid, n_grid);
    for (int j = 0; j < n_grid; ++j)
      for (int i = 0; i < n_grid; ++i)
        fam.L(j, i) = amp * g[(j - i + n_grid) % n_grid];
  }

  fam.sum_sq = fam.L.array().square().colwise().sum();
  return fam;
}

MatrixXc apply_dissipator(const MeasurementFamily& fam, const MatrixXc& rho) {
  const Eigen::Index n = rho.rows();
  if (rho.cols() != n || fam.L.cols() != n)
    throw std::invalid_argument("apply_dissipator: size mismatch");
  const MatrixXr gram = fam.L.transpose() * fam.L;  // sum_r l_r(i) l_r(j)
  MatrixXc out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) =
          (gram(i, j) - 0.5 * (fam.sum_sq[i] + fam.sum_sq[j])) * rho(i, j);
  return out;
}

SseIntegrator::SseIntegrator(const GridSpec& grid, const DynamicsParams& params,
                             const ControlLaw& law)
    : grid_(grid), params_(params), law_(law), sp_(grid) {
  params_.validate();
  law_.validate();
  xi_ = grid_.xi();
  kin_half_ = kinetic_half_phase(grid_, params_.dt);
  harm_half_.resize(grid_.n_points);
  for (int i = 0; i < grid_.n_points; ++i) {
    const double angle = -0.25 * xi_[i] * xi_[i] * params_.dt;  // (xi^2/2)(dt/2)
    harm_half_[i] = Complex(std::cos(angle), std::sin(angle));
  }
  pot_half_ = harm_half_;
  if (params_.alpha_tilde > 0.0) {
    family_ = make_measurement_family(params_, grid_);
    rho_w_.resize(grid_.n_points);
    m_.resize(family_.n_nodes());
    mz_.resize(family_.n_nodes(), 2);
    fields_.resize(grid_.n_points, 2);
  }
  scratch_.resize(grid_.n_points);
}

void SseIntegrator::build_control_phase(const ControlSignal& controls) {
  if (!controls.any()) {
    pot_half_ = harm_half_;
    return;
  }
  const double half_dt = 0.5 * params_.dt;
  const bool linear_only = controls.u[1] == 0.0 && controls.u[2] == 0.0 &&
                           controls.u[3] == 0.0;
  if (linear_only) {
    // Uniform grid: the linear ramp phase is a geometric recurrence.
    const double a0 = -half_dt * controls.u[0] * xi_[0];
    const double da = -half_dt * controls.u[0] * grid_.dxi();
    Complex cur(std::cos(a0), std::sin(a0));
    const Complex step(std::cos(da), std::sin(da));
    for (int i = 0; i < grid_.n_points; ++i) {
      pot_half_[i] = harm_half_[i] * cur;
      cur *= step;
    }
    return;
  }
  for (int i = 0; i < grid_.n_points; ++i) {
    const double x = xi_[i];
    const double poly =
        x * (controls.u[0] +
             x * (controls.u[1] + x * (controls.u[2] + x * controls.u[3])));
    const double angle = -half_dt * poly;
    pot_half_[i] = harm_half_[i] * Complex(std::cos(angle), std::sin(angle));
  }
}

void SseIntegrator::measurement_update(Wavefunction& psi,
                                       const Eigen::Ref<const ArrayXr>& dW) {
  if (dW.size() != family_.n_nodes())
    throw std::invalid_argument("sse_step: noise size does not match family");
  const double dxi = grid_.dxi();
  for (int i = 0; i < grid_.n_points; ++i)
    rho_w_[i] = std::norm(psi.amplitudes[i]) * dxi;
  m_.noalias() = family_.L * rho_w_;
  mz_.col(0) = m_;
  mz_.col(1) = dW.matrix();
  fields_.noalias() = family_.L.transpose() * mz_;
  const double mm = m_.squaredNorm();
  const double mz = m_.dot(dW.matrix());
  const double dt = params_.dt;
  for (int i = 0; i < grid_.n_points; ++i) {
    const double drift =
        -0.5 * (family_.sum_sq[i] - 2.0 * fields_(i, 0) + mm) * dt;
    psi.amplitudes[i] *= 1.0 + drift + (fields_(i, 1) - mz);
  }
}

StepInfo SseIntegrator::step(Wavefunction& psi, const ControlSignal& controls,
                             const Eigen::Ref<const ArrayXr>& dW) {
  build_control_phase(controls);
  apply_kinetic_phase(psi, sp_, kin_half_);
  apply_position_phase(psi, pot_half_);
  if (params_.alpha_tilde > 0.0) measurement_update(psi, dW);
  apply_position_phase(psi, pot_half_);
  apply_kinetic_phase(psi, sp_, kin_half_);

  StepInfo info;
  const double n2 = norm_squared(psi);
  const double norm = std::sqrt(n2);
  info.norm_deficit = std::abs(1.0 - norm);
  if (norm < norm_collapse_limit) {
    info.collapsed = true;
    return info;
  }
  psi.amplitudes /= norm;
  return info;
}

StepInfo SseIntegrator::step(Wavefunction& psi, const ControlSignal& controls,
                             const SpectralNoise& noise) {
  if (params_.rep != MeasurementRep::fourier)
    throw std::invalid_argument("sse_step: spectral noise requires fourier rep");
  const ArrayXr full = from_fourier_noise(noise);
  if (noise.kappa.size() != params_.kernel.n_points())
    throw std::invalid_argument("sse_step: spectral noise grid mismatch");
  // Family draws are unit-Wiener; the spectral field is delta-normalized.
  const double scale = std::sqrt(noise.kappa[1] - noise.kappa[0]);
  ArrayXr dW(family_.n_nodes());
  for (int r = 0; r < family_.n_nodes(); ++r)
    dW[r] = full[family_.node_index[r]] * scale;
  return step(psi, controls, dW);
}

StepInfo SseIntegrator::step(Wavefunction& psi, const ControlSignal& controls,
                             const NoiseRealization& noise) {
  if (params_.rep != MeasurementRep::real_space)
    throw std::invalid_argument("sse_step: position noise requires real_space rep");
  if (noise.values.size() != grid_.n_points)
    throw std::invalid_argument("sse_step: position noise grid mismatch");
  const ArrayXr dW = noise.values * std::sqrt(noise.dxi);
  return step(psi, controls, dW);
}

ControlSignal SseIntegrator::controls(const Wavefunction& psi, double tau) {
  const int top = law_.highest_order();
  if (top == 0) {
    ControlSignal off;
    off.tau = tau;
    return off;
  }
  if (top == 1) {
    // Ehrenfest midpoint: d<p>/dtau = -<x> - u1 (the measurement family adds
    // no deterministic momentum drift; odd kappa moments vanish).
    const double p0 = raw_p(psi, sp_, scratch_);
    const double x0 = raw_x_power(psi, 1);
    ControlSignal mid;
    mid.tau = tau;
    mid.u[0] =
        law_.c[0] * (p0 + 0.5 * params_.dt * (-x0 - law_.c[0] * p0));
    return mid;
  }
  ControlSignal u0 = raw_controls(psi, sp_, law_, tau, scratch_);
  // Higher orders: one deterministic provisional Strang pass, then average.
  Wavefunction probe = psi;
  strang_step_only(probe, u0);
  const ControlSignal u1 = raw_controls(probe, sp_, law_, tau, scratch_);
  ControlSignal mid = u0;
  for (int n = 0; n < max_control_order; ++n)
    mid.u[n] = 0.5 * (u0.u[n] + u1.u[n]);
  return mid;
}

void SseIntegrator::strang_step_only(Wavefunction& psi,
                                     const ControlSignal& controls) {
  build_control_phase(controls);
  apply_kinetic_phase(psi, sp_, kin_half_);
  apply_position_phase(psi, pot_half_);
  apply_position_phase(psi, pot_half_);
  apply_kinetic_phase(psi, sp_, kin_half_);
}

void TrajectoryConfig::validate() const {
  grid.validate();
  dynamics.validate();
  law.validate();
  if (!(tau_max > 0.0)) throw std::domain_error("trajectory: tau_max must be > 0");
  if (!(sample_stride > 0.0))
    throw std::domain_error("trajectory: sample_stride must be > 0");
  const double per = sample_stride / dynamics.dt;
  if (std::abs(per - std::round(per)) > 1e-9 || std::round(per) < 1.0)
    throw std::domain_error("trajectory: sample_stride must be a multiple of dt");
  const double total = tau_max / sample_stride;
  if (std::abs(total - std::round(total)) > 1e-9)
    throw std::domain_error("trajectory: tau_max must be a multiple of sample_stride");
}

int TrajectoryConfig::steps_per_sample() const {
  return static_cast<int>(std::round(sample_stride / dynamics.dt));
}

int TrajectoryConfig::total_steps() const {
  return static_cast<int>(std::round(tau_max / sample_stride)) *
         steps_per_sample();
}

TrajectoryRecord run_trajectory(const TrajectoryConfig& config,
                                std::uint64_t index) {
  SseIntegrator integrator(config.grid, config.dynamics, config.law);
  return run_trajectory_with(integrator, config, index);
}

TrajectoryRecord run_trajectory_with(SseIntegrator& integrator,
                                     const TrajectoryConfig& config,
                                     std::uint64_t index) {
  config.validate();
  const int per = config.steps_per_sample();
  const int total = config.total_steps();
  const int n_samples = total / per + 1;

  TrajectoryRecord rec;
  rec.master_seed = config.seed;
  rec.index = index;
  rec.tau.resize(n_samples);
  rec.energy.resize(n_samples);
  rec.x.resize(n_samples);
  rec.p.resize(n_samples);
  rec.norm_deficit.resize(n_samples);

  Wavefunction psi =
      make_gaussian(config.grid, config.init_center, config.init_sigma2);
  RngStream stream(config.seed, index);
  Spectral& sp = integrator.spectral();

  auto sample = [&](int slot, double tau, double deficit) {
    rec.tau[slot] = tau;
    rec.energy[slot] = energy(psi, sp);
    rec.x[slot] = expect_x_power(psi, 1);
    rec.p[slot] = expect_p(psi, sp);
    rec.norm_deficit[slot] = deficit;
  };
  sample(0, 0.0, 0.0);

  const bool stochastic = config.dynamics.alpha_tilde > 0.0;
  const double sqrt_dt = std::sqrt(config.dynamics.dt);
  ArrayXr dW(stochastic ? integrator.family().n_nodes() : 0);
  int recorded = 1;
  double running_deficit = 0.0;

  for (int k = 0; k < total; ++k) {
    const double tau_k = k * config.dynamics.dt;
    const ControlSignal u = integrator.controls(psi, tau_k);
    if (stochastic)
      for (Eigen::Index r = 0; r < dW.size(); ++r)
        dW[r] = sqrt_dt * stream.normal();
    const StepInfo info = integrator.step(psi, u, dW);
    running_deficit = std::max(running_deficit, info.norm_deficit);
    if (info.collapsed) {
      rec.status = PathStatus::failed;
      rec.failure_reason =
          "norm collapse at tau = " + std::to_string(tau_k + config.dynamics.dt);
      break;
    }
    if ((k + 1) % per == 0) {
      sample(recorded, (k + 1) * config.dynamics.dt, running_deficit);
      ++recorded;
      running_deficit = 0.0;
      if (boundary_fraction(psi) > boundary_density_limit) {
        rec.status = PathStatus::overflowed;
        rec.failure_reason = "grid overflow at tau = " +
                             std::to_string((k + 1) * config.dynamics.dt);
        break;
      }
    }
  }

  if (rec.status != PathStatus::completed && recorded < n_samples) {
    rec.tau.conservativeResize(recorded);
    rec.energy.conservativeResize(recorded);
    rec.x.conservativeResize(recorded);
    rec.p.conservativeResize(recorded);
    rec.norm_deficit.conservativeResize(recorded);
  }
  return rec;
}

// --- density-matrix integrator ---------------------------------------------

DensityMatrix density_from_wavefunction(const Wavefunction& psi) {
  DensityMatrix out;
  out.grid = psi.grid;
  const VectorXc v = psi.amplitudes.matrix();
  out.rho = v * v.adjoint() * psi.grid.dxi();
  return out;
}

SmeIntegrator::SmeIntegrator(const GridSpec& grid, const DynamicsParams& params,
                             const ControlLaw& law)
    : grid_(grid), params_(params), law_(law) {
  params_.validate();
  law_.validate();
  if (grid_.n_points > 64)
    throw std::domain_error("SmeIntegrator: n_points must be <= 64");
  xi_ = grid_.xi();
  const int n = grid_.n_points;

  MatrixXc dft(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      const double angle = -2.0 * pi * k * j / n;
      dft(k, j) = Complex(std::cos(angle), std::sin(angle));
    }
  const ArrayXr kgrid = grid_.k_fft();
  p_op_ = dft.adjoint() * kgrid.matrix().asDiagonal() * dft / double(n);
  p2_op_ = dft.adjoint() * kgrid.square().matrix().asDiagonal() * dft / double(n);
  p_op_ = 0.5 * (p_op_ + p_op_.adjoint()).eval();
  p2_op_ = 0.5 * (p2_op_ + p2_op_.adjoint()).eval();

  MatrixXc h0 = 0.5 * p2_op_;
  for (int i = 0; i < n; ++i) h0(i, i) += 0.5 * xi_[i] * xi_[i];
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h0);
  VectorXc phases(n);
  for (int i = 0; i < n; ++i) {
    const double angle = -0.5 * es.eigenvalues()[i] * params_.dt;
    phases[i] = Complex(std::cos(angle), std::sin(angle));
  }
  u_half_ = es.eigenvectors() * phases.asDiagonal() *
            es.eigenvectors().adjoint();

  family_ = make_measurement_family(params_, grid_);
  k_gen_.resize(n, n);
  const MatrixXr gram = family_.L.transpose() * family_.L;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      k_gen_(i, j) = gram(i, j) - 0.5 * (family_.sum_sq[i] + family_.sum_sq[j]);
  e_kdt_ = (k_gen_ * params_.dt).array().exp().matrix();
}

void SmeIntegrator::conditional_step(DensityMatrix& state,
                                     const ControlSignal& controls,
                                     const Eigen::Ref<const ArrayXr>& dW) {
  const int n = grid_.n_points;
  if (dW.size() != family_.n_nodes())
    throw std::invalid_argument("sme_step: noise size does not match family");
  MatrixXc uc = u_half_;
  if (controls.any()) {
    MatrixXc h = 0.5 * p2_op_;
    for (int i = 0; i < n; ++i) {
      const double x = xi_[i];
      const double poly =
          x * (controls.u[0] +
               x * (controls.u[1] + x * (controls.u[2] + x * controls.u[3])));
      h(i, i) += 0.5 * x * x + poly;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
    VectorXc phases(n);
    for (int i = 0; i < n; ++i) {
      const double angle = -0.5 * es.eigenvalues()[i] * params_.dt;
      phases[i] = Complex(std::cos(angle), std::sin(angle));
    }
    uc = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  }

  state.rho = uc * state.rho * uc.adjoint();

  // Exact Kraus form of the commuting-family measurement update,
  //   rho -> G rho G / Tr,  G = exp(sum_r l_r (dW_r + 2 <L_r> dt) - sum l^2 dt),
  // positive for any noise realization and weakly correct to O(dt).
  const VectorXr diag = state.rho.diagonal().real();
  const VectorXr m = family_.L * diag;
  const VectorXr shifted = dW.matrix() + 2.0 * params_.dt * m;
  const VectorXr a = family_.L.transpose() * shifted;
  ArrayXr g(n);
  for (int i = 0; i < n; ++i)
    g[i] = std::exp(a[i] - family_.sum_sq[i] * params_.dt);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) state.rho(i, j) *= g[i] * g[j];
  state.rho /= state.rho.trace().real();

  state.rho = uc * state.rho * uc.adjoint();
  state.rho = 0.5 * (state.rho + state.rho.adjoint()).eval();
}

void SmeIntegrator::unconditional_step(DensityMatrix& state) {
  state.rho = u_half_ * state.rho * u_half_.adjoint();
  state.rho.array() *= e_kdt_.array();
  state.rho = u_half_ * state.rho * u_half_.adjoint();
}

ControlSignal SmeIntegrator::controls(const DensityMatrix& state,
                                      double tau) const {
  ControlSignal signal;
  signal.tau = tau;
  const int top = law_.highest_order();
  if (top == 0) return signal;
  for (int n = 1; n <= top; ++n) {
    if (law_.c[n - 1] == 0.0) continue;
    MatrixXc bp = p_op_;
    if (n > 1)
      for (int i = 0; i < grid_.n_points; ++i)
        bp.row(i) *= std::pow(xi_[i], n - 1);
    const double sym = 2.0 * (state.rho * bp).trace().real();
    signal.u[n - 1] = law_.c[n - 1] * (0.5 * n) * sym;
  }
  return signal;
}

double SmeIntegrator::expect_x(const DensityMatrix& state) const {
  return (state.rho.diagonal().real().array() * xi_).sum();
}

double SmeIntegrator::expect_p(const DensityMatrix& state) const {
  return (state.rho * p_op_).trace().real();
}

double SmeIntegrator::energy(const DensityMatrix& state) const {
  const double x2 = (state.rho.diagonal().real().array() * xi_.square()).sum();
  const double p2 = (state.rho * p2_op_).trace().real();
  return 0.5 * (x2 + p2);
}

double SmeIntegrator::min_eigenvalue(const DensityMatrix& state) const {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(state.rho,
                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

TrajectoryRecord run_sme_deterministic(const TrajectoryConfig& config) {
  config.validate();
  if (config.law.active())
    throw std::invalid_argument(
        "run_sme_deterministic: the unconditional equation is only closed "
        "without feedback");
  SmeIntegrator integrator(config.grid, config.dynamics, config.law);
  DensityMatrix state = density_from_wavefunction(
      make_gaussian(config.grid, config.init_center, config.init_sigma2));

  const int per = config.steps_per_sample();
  const int total = config.total_steps();
  const int n_samples = total / per + 1;

  TrajectoryRecord rec;
  rec.master_seed = config.seed;
  rec.tau.resize(n_samples);
  rec.energy.resize(n_samples);
  rec.x.resize(n_samples);
  rec.p.resize(n_samples);
  rec.norm_deficit.resize(n_samples);

  auto sample = [&](int slot, double tau) {
    rec.tau[slot] = tau;
    rec.energy[slot] = integrator.energy(state);
    rec.x[slot] = integrator.expect_x(state);
    rec.p[slot] = integrator.expect_p(state);
    rec.norm_deficit[slot] = std::abs(1.0 - state.rho.trace().real());
    if (integrator.min_eigenvalue(state) < -1e-6)
      throw std::runtime_error("run_sme_deterministic: positivity violation");
  };
  sample(0, 0.0);
  for (int k = 0; k < total; ++k) {
    integrator.unconditional_step(state);
    if ((k + 1) % per == 0)
      sample((k + 1) / per, (k + 1) * config.dynamics.dt);
  }
  return rec;
}

}  // namespace fbcool
