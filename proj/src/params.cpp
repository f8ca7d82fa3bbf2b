#include "fbcool/params.hpp"

#include <cmath>
#include <stdexcept>

#include "fbcool/types.hpp"

namespace fbcool {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0))
    throw std::domain_error(std::string("physical params: ") + name +
                            " must be > 0");
}

double gamma_sp_of(const PhysicalParams& p) {
  return (1.0 / (4.0 * pi * epsilon0_si)) * 4.0 * p.dipole * p.dipole *
         p.k0 * p.k0 * p.k0 / (3.0 * hbar_si);
}

double omega_rabi_of(const PhysicalParams& p) {
  const double two_pi_cubed = 2.0 * std::pow(2.0 * pi, 3);
  return (p.dipole / hbar_si) *
         std::sqrt(p.flux * p.k0 * hbar_si / (two_pi_cubed * epsilon0_si));
}

}  // namespace

DimensionlessParams derive_dimensionless(const PhysicalParams& phys) {
  require_positive(phys.dipole, "dipole");
  require_positive(phys.k0, "k0");
  require_positive(phys.omega_t, "omega_t");
  require_positive(phys.omega_z, "omega_z");
  require_positive(phys.delta, "delta");
  require_positive(phys.flux, "flux");
  require_positive(phys.mass, "mass");

  DimensionlessParams out;
  out.x0 = std::sqrt(hbar_si / (phys.mass * phys.omega_t));
  out.z0 = std::sqrt(hbar_si / (phys.mass * phys.omega_z));
  out.eta = phys.k0 * out.x0;
  out.w = 0.5 * phys.k0 * phys.k0 * out.z0 * out.z0;
  out.gamma_sp = gamma_sp_of(phys);
  out.omega_rabi = omega_rabi_of(phys);
  const double ratio = out.omega_rabi / phys.delta;
  out.alpha = (out.gamma_sp / phys.omega_t) * ratio * ratio;
  out.alpha_tilde = 3.0 * out.alpha / (2.0 * pi * pi);
  return out;
}

std::vector<std::string> validate_regime(const PhysicalParams& phys) {
  std::vector<std::string> warnings;
  const DimensionlessParams d = derive_dimensionless(phys);
  auto check = [&warnings](double big, double small, const char* msg) {
    if (!(big >= 10.0 * small)) warnings.emplace_back(msg);
  };
  check(phys.delta, d.omega_rabi, "detuning not >> Rabi frequency");
  check(phys.delta, d.gamma_sp, "detuning not >> spontaneous emission rate");
  check(phys.delta, phys.omega_t, "detuning not >> trap frequency");
  check(d.omega_rabi, d.gamma_sp, "Rabi frequency not >> spontaneous emission rate");
  check(d.omega_rabi, phys.omega_t, "Rabi frequency not >> trap frequency");
  if (!(d.w >= 100.0)) warnings.emplace_back("w not >> 1");
  return warnings;
}

}  // namespace fbcool
