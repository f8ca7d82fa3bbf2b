#include "fbcool/kernels.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "fbcool/csv.hpp"
#include "fbcool/quadrature.hpp"

namespace fbcool {

namespace {

double polarization(double kappa_x, PolarizationFactor pol) {
  // Dipole taken along x: [d.eps]^2/d^2 = 1 - kappa_x^2.
  return pol == PolarizationFactor::unity ? 1.0 : 1.0 - kappa_x * kappa_x;
}

}  // namespace

void KernelConfig::validate() const {
  if (!(w >= 0.0)) throw std::domain_error("kernel config: w must be >= 0");
  if (n_kappa < 8 || n_kappa % 2 != 0)
    throw std::domain_error("kernel config: n_kappa must be even and >= 8");
  if (!(quad_tol > 0.0) || quad_tol > 1e-2)
    throw std::domain_error("kernel config: quad_tol must lie in (0, 1e-2]");
}

double gamma_tilde_gaussian(double kappa, double w, double quad_tol) {
  if (!(w > 0.0)) throw std::domain_error("gamma_tilde_gaussian: w must be > 0");
  const double k2 = kappa * kappa;
  // exp(-w ky^2) alone bounds the tail; 42 e-foldings is below double noise.
  const double ky_max = std::sqrt(42.0 / w);
  auto integrand = [k2, w](double ky) {
    const double s = k2 + ky * ky;
    return std::exp(-w * ky * ky - 0.25 * w * s * s);
  };
  return 2.0 * integrate_adaptive(integrand, 0.0, ky_max, quad_tol);
}

double gamma_tilde_full(double kappa, double w, double quad_tol,
                        PolarizationFactor pol) {
  if (!(std::abs(kappa) < 1.0))
    throw std::domain_error("gamma_tilde_full: requires |kappa| < 1");
  if (!(w >= 0.0)) throw std::domain_error("gamma_tilde_full: w must be >= 0");
  const double s = std::sqrt(1.0 - kappa * kappa);
  const double p = polarization(kappa, pol);
  // k_y = s sin(theta) removes the 1/kz endpoint singularity: the Jacobian
  // s cos(theta) cancels kz = s cos(theta) exactly.
  auto integrand = [s, w, p](double theta) {
    const double kz = s * std::cos(theta);
    const double ky = s * std::sin(theta);
    const double d = 1.0 - kz;
    return p * std::exp(-w * (d * d + ky * ky));
  };
  return 2.0 * integrate_adaptive(integrand, 0.0, 0.5 * pi, quad_tol);
}

double gamma_pancake(double kappa_x, double kappa_y, double w,
                     PolarizationFactor pol) {
  const double r2 = kappa_x * kappa_x + kappa_y * kappa_y;
  if (!(r2 < 1.0))
    throw std::domain_error("gamma_pancake: requires kx^2 + ky^2 < 1");
  const double kz = std::sqrt(1.0 - r2);
  const double d = 1.0 - kz;
  return polarization(kappa_x, pol) * std::exp(-w * d * d) / kz;
}

KernelTable tabulate_kernel(const KernelConfig& config) {
  config.validate();
  const int n = config.n_kappa;
  KernelTable table;
  table.w = config.w;
  table.method = config.method;
  table.kappa = ArrayXr::LinSpaced(n + 1, -1.0, 1.0);
  table.gamma = ArrayXr::Zero(n + 1);

  const int mid = n / 2;
  for (int i = mid; i <= n; ++i) {
    const double kap = table.kappa[i];
    double value = 0.0;
    try {
      if (config.method == KernelMethod::gaussian) {
        value = gamma_tilde_gaussian(kap, config.w, config.quad_tol);
      } else {
        // Integration range collapses at the endpoint.
        value = (i == n) ? 0.0
                         : gamma_tilde_full(kap, config.w, config.quad_tol,
                                            config.polarization);
      }
    } catch (const QuadratureError& err) {
      throw QuadratureError("tabulate_kernel: quadrature failed at kappa = " +
                                std::to_string(kap) + ": " + err.what(),
                            err.best_estimate());
    }
    table.gamma[i] = value;
    table.gamma[n - i] = value;  // mirror
  }
  return table;
}

double kernel_moment(const KernelTable& table, int n) {
  if (n < 0 || n % 2 != 0)
    throw std::domain_error("kernel_moment: order must be even and >= 0");
  const int m = table.n_points();
  if (m < 3 || m % 2 == 0)
    throw std::domain_error("kernel_moment: table needs an odd point count");
  const double h = table.dkappa();
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const double coeff = (i == 0 || i == m - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += coeff * std::pow(table.kappa[i], n) * table.gamma[i];
  }
  return sum * h / 3.0;
}

ArrayXr kernel_realspace(const KernelTable& table, double eta,
                         const ArrayXr& xi_grid) {
  if (!(eta > 0.0)) throw std::domain_error("kernel_realspace: eta must be > 0");
  const int m = table.n_points();
  const double h = table.dkappa();
  const double front = std::sqrt(3.0 * eta / (8.0 * pi));

  ArrayXr weight(m);
  ArrayXr amp(m);
  for (int i = 0; i < m; ++i) {
    const double coeff = (i == 0 || i == m - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    weight[i] = coeff * h / 3.0;
    amp[i] = std::sqrt(table.gamma[i] / (2.0 * pi));
  }

  ArrayXr out(xi_grid.size());
  double max_abs = 0.0;
  double max_imag = 0.0;
  for (Eigen::Index j = 0; j < xi_grid.size(); ++j) {
    double re = 0.0;
    double im = 0.0;
    for (int i = 0; i < m; ++i) {
      const double phase = eta * table.kappa[i] * xi_grid[j];
      re += weight[i] * amp[i] * std::cos(phase);
      im += weight[i] * amp[i] * std::sin(phase);
    }
    out[j] = front * re;
    max_abs = std::max(max_abs, std::abs(front * re));
    max_imag = std::max(max_imag, std::abs(front * im));
  }
  if (max_abs > 0.0 && max_imag > 1e-12 * max_abs)
    throw std::runtime_error("kernel_realspace: imaginary residue above 1e-12");
  return out;
}

void write_kernel_csv(std::ostream& os, const KernelTable& table) {
  os << "kappa,gamma\n";
  for (int i = 0; i < table.n_points(); ++i)
    os << format_g17(table.kappa[i]) << ',' << format_g17(table.gamma[i]) << '\n';
}

}  // namespace fbcool
