#pragma once

#include <cstdint>
#include <vector>

#include "fbcool/dynamics.hpp"

namespace fbcool {

// Mean-field state phi(xi): same storage as a Wavefunction, but the norm is
// not constrained to 1 and drifts under the measurement terms.
using MeanField = Wavefunction;

// The printed equation multiplies the noise integral by alpha~; a dimensional
// reading suggests sqrt(alpha~). Both are kept behind this switch so the
// convergence behaviour can be checked under either.
enum class NoisePrefactor { as_printed, sqrt_alpha };

struct MeanFieldParams {
  double alpha_tilde = 0.0;
  double eta = 1.0;
  KernelTable kernel;
  double dt = 1e-3;
  NoisePrefactor prefactor = NoisePrefactor::as_printed;
};

// d phi = [-i H_a phi - (alpha~/2) (int gamma~ dkappa) phi] dtau
//         + prefactor * phi * int dkappa sqrt(gamma~) e^{-i eta kappa xi} dW~*,
// with the Hamiltonian Strang-split exactly as in the SSE integrator. The
// noise integral reduces to the same real field as the SSE measurement
// channels, so both integrators share the node family. No renormalization.
class MeanFieldIntegrator {
 public:
  MeanFieldIntegrator(const GridSpec& grid, const MeanFieldParams& params,
                      const ControlLaw& law);

  // One Ito step; dW holds N(0, dt) draws per family node. Returns false
  // once amplitudes exceed 1e6 or the norm exceeds 1e3 (divergence flag).
  bool step(MeanField& phi, const ControlSignal& controls,
            const Eigen::Ref<const ArrayXr>& dW);

  ControlSignal controls(const MeanField& phi, double tau);

  const MeasurementFamily& family() const { return core_.family(); }
  int n_noise_channels() const;

 private:
  SseIntegrator core_;
  MeanFieldParams params_;
  double decay_rate_ = 0.0;   // (alpha~/2) int gamma~ dkappa, discrete
  double noise_scale_ = 0.0;  // maps family field L^T dW to the noise term
  ArrayXr field_;
};

double meanfield_norm(const MeanField& phi);

// --- step-refinement probe --------------------------------------------------

enum class ProbeTarget { mean_field, single_atom_sse };
enum class ProbeVerdict { converging, non_converging, diverged };

// Finest-pair agreement bound for a `converging` verdict: after the last
// halving the solutions must coincide to this fraction of the solution norm.
inline constexpr double probe_agreement_limit = 3e-3;

struct ProbeConfig {
  GridSpec grid{512, 40.0};
  double alpha_tilde = 10.0;
  double eta = 6.0;
  KernelTable kernel;
  ControlLaw law;  // caller chooses; figures use c1 = 2
  NoisePrefactor prefactor = NoisePrefactor::as_printed;
  ProbeTarget target = ProbeTarget::mean_field;
  std::vector<double> dt_ladder{8e-3, 4e-3, 2e-3, 1e-3};  // strict halving
  double tau_horizon = 5.0;
  double snapshot_stride = 0.2;
  int n_paths = 16;  // D per level is the median of the pathwise distances
  double init_center = 2.0;
  double init_sigma2 = 0.5;
  std::uint64_t seed = 101;

  void validate() const;
};

struct ConvergenceReport {
  ProbeTarget target = ProbeTarget::mean_field;
  NoisePrefactor prefactor = NoisePrefactor::as_printed;
  std::vector<double> dt_ladder;
  std::vector<double> distance;  // D(dt_l) = median over paths of
                                 // max_tau ||phi_l - phi_{l+1}||_2
  std::vector<double> ratio;     // D_l / D_{l+1}
  double geometric_mean_ratio = 0.0;
  double solution_scale = 1.0;      // median over paths of max_tau ||phi||
  double finest_relative = 0.0;     // distance.back() / solution_scale
  double norm_drift_per_tau = 0.0;  // finest level, mean over paths
  ProbeVerdict verdict = ProbeVerdict::non_converging;
  double diverged_tau = -1.0;
};

// Matched-noise refinement study: every level consumes the same fine-step
// Wiener increments, coarser levels summing them blockwise. The verdict is
// `converging` only when every halving shrinks D by at least a factor 1.3.
ConvergenceReport convergence_probe(const ProbeConfig& config);

}  // namespace fbcool
