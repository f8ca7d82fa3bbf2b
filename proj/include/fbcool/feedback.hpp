#pragma once

#include <array>

#include "fbcool/state.hpp"
#include "fbcool/types.hpp"

namespace fbcool {

inline constexpr int max_control_order = 4;

// Damping gains c_n >= 0 for the control potential sum_n u_n(t) xi^n.
struct ControlLaw {
  std::array<double, max_control_order> c{0.0, 0.0, 0.0, 0.0};  // c[n-1] = c_n

  void validate() const;
  bool active() const;
  int highest_order() const;  // 0 when inactive
};

struct ControlSignal {
  std::array<double, max_control_order> u{0.0, 0.0, 0.0, 0.0};  // u[n-1] = u_n
  double tau = 0.0;

  bool any() const;
};

// u_n = c_n (n/2) <p x^{n-1} + x^{n-1} p>; in particular u_1 = c_1 <p>.
ControlSignal compute_controls(const Wavefunction& psi, const Spectral& sp,
                               const ControlLaw& law, double tau = 0.0);

// Pointwise sum_n u_n xi^n on the grid.
ArrayXr control_potential(const ControlSignal& signal, const ArrayXr& xi);

}  // namespace fbcool
