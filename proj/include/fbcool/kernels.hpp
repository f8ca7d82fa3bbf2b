#pragma once

#include <iosfwd>

#include "fbcool/types.hpp"

namespace fbcool {

// Measurement spectrum gamma~(kappa) of dispersive imaging on a cigar-shaped
// cloud, kappa = k_x/k_0 in [-1,1]. `full` keeps the exact scattering-shell
// integrand, `gaussian` is the large-w form valid when the tight confinement
// length far exceeds the optical wavelength.
enum class KernelMethod { full, gaussian };

// [d.eps]^2/d^2 projection of the dipole onto the scattered polarization.
// `unity` replaces it by 1 (excellent at large w); `dipole` keeps 1-kappa_x^2
// for a dipole aligned with the imaging plane.
enum class PolarizationFactor { unity, dipole };

struct KernelConfig {
  double w = 3000.0;  // w = k0^2 z0^2 / 2
  KernelMethod method = KernelMethod::gaussian;
  int n_kappa = 64;  // grid intervals over [-1,1]; must be even
  double quad_tol = 1e-10;
  PolarizationFactor polarization = PolarizationFactor::unity;

  void validate() const;
};

struct KernelTable {
  ArrayXr kappa;  // n_kappa + 1 uniform points on [-1,1]
  ArrayXr gamma;  // gamma~(kappa) >= 0, even in kappa
  double w = 0.0;
  KernelMethod method = KernelMethod::gaussian;

  double dkappa() const { return kappa[1] - kappa[0]; }
  int n_points() const { return static_cast<int>(kappa.size()); }
};

// gamma~(kappa) = int dk_y exp(-w k_y^2) exp(-w (kappa^2+k_y^2)^2 / 4).
double gamma_tilde_gaussian(double kappa, double w, double quad_tol = 1e-10);

// Exact shell integrand over k_y in (-sqrt(1-kappa^2), sqrt(1-kappa^2)) with
// the inverse-square-root endpoint singularity removed by k_y = s sin(theta).
// Requires |kappa| < 1.
double gamma_tilde_full(double kappa, double w, double quad_tol = 1e-10,
                        PolarizationFactor pol = PolarizationFactor::unity);

// 2D spectrum of the pancake geometry, evaluated pointwise (no dynamics
// attached): gamma(kx,ky) = pol * exp(-w (1-kz)^2) / kz, kz = sqrt(1-kx^2-ky^2).
double gamma_pancake(double kappa_x, double kappa_y, double w,
                     PolarizationFactor pol = PolarizationFactor::unity);

// Tabulates gamma~ on the uniform kappa grid. The kappa >= 0 half is computed
// and mirrored, so evenness holds exactly. For the full method the endpoint
// |kappa| = 1 has a collapsed integration range and tabulates as 0.
KernelTable tabulate_kernel(const KernelConfig& config);

// int_{-1}^{1} kappa^n gamma~(kappa) dkappa by composite Simpson on the table
// grid. n must be even (odd moments vanish by symmetry and are not exposed).
double kernel_moment(const KernelTable& table, int n);

// Real-space kernel Gamma~_eta(xi) = sqrt(3 eta / 8 pi) *
// int dkappa sqrt(gamma~(kappa)/2pi) exp(i eta kappa xi), evaluated on the
// given xi grid by Simpson summation over the table. The result is real and
// even; the imaginary residue is checked against 1e-12 of the peak.
ArrayXr kernel_realspace(const KernelTable& table, double eta,
                         const ArrayXr& xi_grid);

// CSV export: header "kappa,gamma", LF line endings, 17 significant digits.
void write_kernel_csv(std::ostream& os, const KernelTable& table);

}  // namespace fbcool
