#pragma once

#include <iosfwd>

#include "fbcool/grid.hpp"
#include "fbcool/types.hpp"

namespace fbcool {

// Position-representation wavefunction on a periodic grid. Amplitudes are
// kept normalized (sum |psi|^2 dxi = 1) by every constructor and step.
struct Wavefunction {
  GridSpec grid;
  ArrayXc amplitudes;
};

// Coherent-state Gaussian psi ~ exp(-(xi-center)^2 / (4 sigma2)), normalized.
// sigma2 = 1/2 is the oscillator ground-state width. center +- 5 sigma must
// lie inside the grid.
Wavefunction make_gaussian(const GridSpec& grid, double center,
                           double sigma2 = 0.5);

double norm_squared(const Wavefunction& psi);
void normalize(Wavefunction& psi);

// Density at the two outermost cells relative to the peak; used to detect a
// trajectory escaping the box.
double boundary_fraction(const Wavefunction& psi);
inline constexpr double boundary_density_limit = 1e-8;

// <xi^n> for n in 1..4. Throws if the state is visibly unnormalized
// (norm deviation > 1e-6).
double expect_x_power(const Wavefunction& psi, int n);

double expect_p(const Wavefunction& psi, const Spectral& sp);
double expect_p2(const Wavefunction& psi, const Spectral& sp);

// <p x^{n-1} + x^{n-1} p> = 2 Re <psi| x^{n-1} p |psi>, n in 1..4.
double expect_sym_xp(const Wavefunction& psi, const Spectral& sp, int n);

// (<x^2> + <p^2>) / 2 in units of hbar omega_T.
double energy(const Wavefunction& psi, const Spectral& sp);

// exp(-i k^2/2 * dt/2) in momentum space: half the kinetic term of a Strang
// cycle. Norm-preserving to machine precision.
void kinetic_half_step(Wavefunction& psi, const Spectral& sp, double dt);

// Pointwise phase exp(-i V(xi) dt/2).
void potential_half_step(Wavefunction& psi, const ArrayXr& potential,
                         double dt);

// Cached-phase variants for the integrator hot loop.
ArrayXc kinetic_half_phase(const GridSpec& grid, double dt);
void apply_kinetic_phase(Wavefunction& psi, const Spectral& sp,
                         const ArrayXc& phase);
inline void apply_position_phase(Wavefunction& psi, const ArrayXc& phase) {
  psi.amplitudes *= phase;
}

// Snapshot dump: one JSON header line {"n_points":..,"L":..,"tau":..}
// followed by n_points interleaved (re, im) little-endian doubles.
void write_snapshot(std::ostream& os, const Wavefunction& psi, double tau);
Wavefunction read_snapshot(std::istream& is, double* tau = nullptr);

}  // namespace fbcool
