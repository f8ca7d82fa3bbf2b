#pragma once

#include "fbcool/grid.hpp"
#include "fbcool/rng.hpp"
#include "fbcool/types.hpp"

namespace fbcool {

// One step of the real-space white-noise field dW(xi, tau). Each entry is an
// independent Gaussian with variance dt/dxi (lattice regularization of the
// delta-correlated continuum field).
struct NoiseRealization {
  ArrayXr values;
  double dt = 0.0;
  double dxi = 0.0;
};

NoiseRealization sample_position_noise(const GridSpec& grid, double dt,
                                       RngStream& stream);

// Fourier-space noise dW~(kappa) = (i-1)/2 [dW(kappa) + i dW(-kappa)] on a
// symmetric kappa grid. Hermitian symmetry value(-kappa) = conj(value(kappa))
// holds exactly by construction.
struct SpectralNoise {
  ArrayXr kappa;
  ArrayXc values;
};

// real_increments holds per-node Wiener samples over the full symmetric grid.
SpectralNoise to_fourier_noise(const ArrayXr& kappa_grid,
                               const ArrayXr& real_increments);

// Inverts the construction: dW(kappa) = Im dW~(kappa) - Re dW~(kappa).
ArrayXr from_fourier_noise(const SpectralNoise& noise);

// Delta-normalized spectral draws (variance dt/dkappa per node) pushed
// through to_fourier_noise.
SpectralNoise sample_spectral_noise(const ArrayXr& kappa_grid, double dt,
                                    RngStream& stream);

}  // namespace fbcool
