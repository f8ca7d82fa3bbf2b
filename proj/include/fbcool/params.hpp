#pragma once

#include <string>
#include <vector>

namespace fbcool {

// CODATA 2018.
inline constexpr double hbar_si = 1.054571817e-34;    // J s
inline constexpr double epsilon0_si = 8.8541878128e-12;  // F / m

// Laboratory inputs, SI units throughout.
struct PhysicalParams {
  double dipole = 0.0;   // |d_ge|, C m
  double k0 = 0.0;       // laser wavenumber, 1/m
  double omega_t = 0.0;  // x trap frequency, rad/s
  double omega_z = 0.0;  // tight trap frequency, rad/s
  double delta = 0.0;    // detuning, rad/s
  double flux = 0.0;     // laser photon flux F0, photons/s
  double mass = 0.0;     // atomic mass, kg
};

struct DimensionlessParams {
  double alpha = 0.0;        // (Gamma_sp / omega_T) (Omega / Delta)^2
  double alpha_tilde = 0.0;  // 3 alpha / (2 pi^2)
  double eta = 0.0;          // Lamb-Dicke k0 x0
  double w = 0.0;            // k0^2 z0^2 / 2
  double x0 = 0.0;           // sqrt(hbar / m omega_T), m
  double z0 = 0.0;           // sqrt(hbar / m omega_z), m
  double gamma_sp = 0.0;     // spontaneous emission rate, rad/s
  double omega_rabi = 0.0;   // Rabi frequency, rad/s
};

DimensionlessParams derive_dimensionless(const PhysicalParams& phys);

// One warning per violated ordering, using ratio >= 10 as the margin for the
// large-detuning hierarchy Delta >> Omega, Gamma_sp, omega_T and
// Omega >> Gamma_sp, omega_T, plus w >= 100 for the tight-confinement limit.
std::vector<std::string> validate_regime(const PhysicalParams& phys);

}  // namespace fbcool
