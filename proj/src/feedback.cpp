#include "fbcool/feedback.hpp"

#include <stdexcept>

namespace fbcool {

void ControlLaw::validate() const {
  for (double cn : c)
    if (cn < 0.0)
      throw std::domain_error("control law: gains must be >= 0 (damping sign)");
}

bool ControlLaw::active() const {
  for (double cn : c)
    if (cn > 0.0) return true;
  return false;
}

int ControlLaw::highest_order() const {
  for (int n = max_control_order; n >= 1; --n)
    if (c[n - 1] > 0.0) return n;
  return 0;
}

bool ControlSignal::any() const {
  for (double un : u)
    if (un != 0.0) return true;
  return false;
}

ControlSignal compute_controls(const Wavefunction& psi, const Spectral& sp,
                               const ControlLaw& law, double tau) {
  law.validate();
  ControlSignal signal;
  signal.tau = tau;
  for (int n = 1; n <= max_control_order; ++n) {
    if (law.c[n - 1] == 0.0) continue;
    signal.u[n - 1] = law.c[n - 1] * (0.5 * n) * expect_sym_xp(psi, sp, n);
  }
  return signal;
}

ArrayXr control_potential(const ControlSignal& signal, const ArrayXr& xi) {
  ArrayXr out = ArrayXr::Zero(xi.size());
  ArrayXr power = ArrayXr::Ones(xi.size());
  for (int n = 1; n <= max_control_order; ++n) {
    power *= xi;
    if (signal.u[n - 1] != 0.0) out += signal.u[n - 1] * power;
  }
  return out;
}

}  // namespace fbcool
