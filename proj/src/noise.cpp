#include "fbcool/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace fbcool {

namespace {

void require_symmetric(const ArrayXr& kappa) {
  const Eigen::Index n = kappa.size();
  if (n < 3 || n % 2 == 0)
    throw std::domain_error("noise: kappa grid must have an odd point count");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(kappa[i] + kappa[n - 1 - i]) > 1e-12)
      throw std::domain_error("noise: kappa grid is not symmetric about 0");
  }
}

}  // namespace

NoiseRealization sample_position_noise(const GridSpec& grid, double dt,
                                       RngStream& stream) {
  if (!(dt > 0.0)) throw std::domain_error("sample_position_noise: dt must be > 0");
  grid.validate();
  NoiseRealization out;
  out.dt = dt;
  out.dxi = grid.dxi();
  out.values.resize(grid.n_points);
  const double sigma = std::sqrt(dt / out.dxi);
  for (int i = 0; i < grid.n_points; ++i) out.values[i] = sigma * stream.normal();
  return out;
}

SpectralNoise to_fourier_noise(const ArrayXr& kappa_grid,
                               const ArrayXr& real_increments) {
  require_symmetric(kappa_grid);
  if (real_increments.size() != kappa_grid.size())
    throw std::domain_error("to_fourier_noise: increment/grid size mismatch");
  const Eigen::Index n = kappa_grid.size();
  SpectralNoise out;
  out.kappa = kappa_grid;
  out.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w_pos = real_increments[i];
    const double w_neg = real_increments[n - 1 - i];
    // (i-1)/2 (w_pos + i w_neg) = -(w_pos + w_neg)/2 + i (w_pos - w_neg)/2
    out.values[i] = Complex(-0.5 * (w_pos + w_neg), 0.5 * (w_pos - w_neg));
  }
  return out;
}

ArrayXr from_fourier_noise(const SpectralNoise& noise) {
  ArrayXr out(noise.values.size());
  for (Eigen::Index i = 0; i < noise.values.size(); ++i)
    out[i] = noise.values[i].imag() - noise.values[i].real();
  return out;
}

SpectralNoise sample_spectral_noise(const ArrayXr& kappa_grid, double dt,
                                    RngStream& stream) {
  require_symmetric(kappa_grid);
  if (!(dt > 0.0)) throw std::domain_error("sample_spectral_noise: dt must be > 0");
  const double dkappa = kappa_grid[1] - kappa_grid[0];
  const double sigma = std::sqrt(dt / dkappa);
  ArrayXr draws(kappa_grid.size());
  for (Eigen::Index i = 0; i < draws.size(); ++i) draws[i] = sigma * stream.normal();
  return to_fourier_noise(kappa_grid, draws);
}

}  // namespace fbcool
