#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fbcool/feedback.hpp"
#include "fbcool/grid.hpp"
#include "fbcool/kernels.hpp"
#include "fbcool/noise.hpp"
#include "fbcool/state.hpp"
#include "fbcool/types.hpp"

namespace fbcool {

enum class MeasurementRep { fourier, real_space };

struct DynamicsParams {
  double alpha_tilde = 0.0;
  double eta = 1.0;
  KernelTable kernel;
  double dt = 1e-3;
  MeasurementRep rep = MeasurementRep::fourier;

  void validate() const;
};

// Diagonal measurement operators in position space, one row per noise
// channel. In the fourier representation the channels are the kappa
// quadrature nodes of the kernel table: folding the +-kappa phase operators
// with the complex-noise pairing dW~*(kappa) over to independent real Wiener
// increments leaves one Hermitian operator per node,
//   A_kappa = -sqrt(gamma~(kappa)) [cos(eta kappa xi) + sin(eta kappa xi)],
// so L(j,i) = sqrt(alpha~ w_j) A_kappa_j(xi_i). Nodes whose quadrature weight
// times gamma~ is below 1e-14 of the peak carry no measurable contribution
// and are dropped (symmetrically).
//
// In the real_space representation the channels are the grid points,
// L(j,i) = sqrt(alpha' dxi) Gamma~_eta(x_j - xi_i) with alpha' = 8 pi/3 *
// alpha~, the normalization that makes both families induce the same
// generator. Differences wrap periodically.
struct MeasurementFamily {
  MeasurementRep rep = MeasurementRep::fourier;
  ArrayXr node_kappa;           // fourier rep only
  std::vector<int> node_index;  // indices into the full kernel grid
  MatrixXr L;                   // n_nodes x n_grid
  ArrayXr sum_sq;               // per grid point: sum_j L(j,i)^2
  double m0 = 0.0;              // int gamma~ dkappa (Simpson on the table)
  double m2 = 0.0;              // int kappa^2 gamma~ dkappa
  double m0_active = 0.0;       // same sum restricted to the kept nodes

  int n_nodes() const { return static_cast<int>(L.rows()); }
};

MeasurementFamily make_measurement_family(const DynamicsParams& params,
                                          const GridSpec& grid);

// Dissipator action sum_j [L_j rho L_j - 1/2 {L_j^2, rho}] for the diagonal
// Hermitian family; elementwise in the position representation.
MatrixXc apply_dissipator(const MeasurementFamily& fam, const MatrixXc& rho);

struct StepInfo {
  double norm_deficit = 0.0;  // |1 - norm| before renormalization
  bool collapsed = false;     // pre-renormalization norm below 1e-6
};

// Normalized diffusive unravelling of the conditional master equation:
// Strang-split Hamiltonian halves around an Euler-Maruyama measurement
// update with drift -1/2 sum_j (L_j - <L_j>)^2 dt and noise
// sum_j (L_j - <L_j>) dW_j, renormalizing each step. alpha~ = 0 short-
// circuits the measurement update entirely.
class SseIntegrator {
 public:
  SseIntegrator(const GridSpec& grid, const DynamicsParams& params,
                const ControlLaw& law);

  // One Ito step with frozen control signal. dW holds one N(0, dt) draw per
  // family node (ignored when alpha~ = 0).
  StepInfo step(Wavefunction& psi, const ControlSignal& controls,
                const Eigen::Ref<const ArrayXr>& dW);

  // Adapters for noise carried in the spec'd container types.
  StepInfo step(Wavefunction& psi, const ControlSignal& controls,
                const SpectralNoise& noise);
  StepInfo step(Wavefunction& psi, const ControlSignal& controls,
                const NoiseRealization& noise);

  // Control signal for the step starting at psi, with the gains evaluated at
  // the predicted midpoint so the feedback coupling stays second order in dt.
  ControlSignal controls(const Wavefunction& psi, double tau);

  const MeasurementFamily& family() const { return family_; }
  const DynamicsParams& params() const { return params_; }
  const GridSpec& grid() const { return grid_; }
  const ControlLaw& law() const { return law_; }
  Spectral& spectral() { return sp_; }

 private:
  friend class MeanFieldIntegrator;
  void build_control_phase(const ControlSignal& controls);
  void strang_step_only(Wavefunction& psi, const ControlSignal& controls);
  void measurement_update(Wavefunction& psi,
                          const Eigen::Ref<const ArrayXr>& dW);

  GridSpec grid_;
  DynamicsParams params_;
  ControlLaw law_;
  Spectral sp_;
  MeasurementFamily family_;
  ArrayXr xi_;
  ArrayXc kin_half_;
  ArrayXc harm_half_;
  ArrayXc pot_half_;  // harmonic + control, per step
  // measurement scratch
  VectorXr rho_w_;
  VectorXr m_;
  MatrixXr mz_;
  MatrixXr fields_;
  ArrayXc scratch_;
};

enum class PathStatus { completed, overflowed, failed };

struct TrajectoryRecord {
  ArrayXr tau;
  ArrayXr energy;
  ArrayXr x;
  ArrayXr p;
  ArrayXr norm_deficit;  // max pre-renormalization deficit since last sample
  PathStatus status = PathStatus::completed;
  std::string failure_reason;
  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;

  Eigen::Index samples() const { return tau.size(); }
};

struct TrajectoryConfig {
  GridSpec grid;
  DynamicsParams dynamics;
  ControlLaw law;
  double tau_max = 50.0;
  double sample_stride = 0.05;
  double init_center = 2.0;
  double init_sigma2 = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
  int steps_per_sample() const;
  int total_steps() const;
};

// Deterministic given (config.seed, index); the per-path stream is never
// shared, so records are identical for any worker count.
TrajectoryRecord run_trajectory(const TrajectoryConfig& config,
                                std::uint64_t index);
TrajectoryRecord run_trajectory_with(SseIntegrator& integrator,
                                     const TrajectoryConfig& config,
                                     std::uint64_t index);

// --- Density-matrix integrator for small-grid validation -------------------

struct DensityMatrix {
  GridSpec grid;
  MatrixXc rho;  // position representation, trace = 1 (dxi folded in)
};

DensityMatrix density_from_wavefunction(const Wavefunction& psi);

class SmeIntegrator {
 public:
  SmeIntegrator(const GridSpec& grid, const DynamicsParams& params,
                const ControlLaw& law);

  // Conditional SME step: Strang Hamiltonian halves around Euler-Maruyama
  // dissipator + innovation, trace renormalized.
  void conditional_step(DensityMatrix& state, const ControlSignal& controls,
                        const Eigen::Ref<const ArrayXr>& dW);

  // Unconditional master equation (innovation off, no control): exact
  // elementwise exponential of the dissipator between Hamiltonian halves.
  void unconditional_step(DensityMatrix& state);

  ControlSignal controls(const DensityMatrix& state, double tau) const;

  double expect_x(const DensityMatrix& state) const;
  double expect_p(const DensityMatrix& state) const;
  double energy(const DensityMatrix& state) const;
  double min_eigenvalue(const DensityMatrix& state) const;
  const MeasurementFamily& family() const { return family_; }

 private:
  GridSpec grid_;
  DynamicsParams params_;
  ControlLaw law_;
  MeasurementFamily family_;
  ArrayXr xi_;
  MatrixXc p_op_;       // spectral momentum operator
  MatrixXc p2_op_;
  MatrixXc u_half_;  // exp(-i H0 dt/2), control-free part
  MatrixXr k_gen_;   // dissipator kernel K_ij
  MatrixXr e_kdt_;   // exp(K_ij dt) for the unconditional split step
};

// Unconditional evolution from a Gaussian initial state; record sampled on
// the same stride convention as run_trajectory. Requires an inactive control
// law (the ensemble-averaged equation is only closed without feedback).
TrajectoryRecord run_sme_deterministic(const TrajectoryConfig& config);

}  // namespace fbcool
