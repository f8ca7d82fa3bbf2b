#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace fbcool {

// Thrown when adaptive refinement exhausts the depth budget before meeting
// the requested tolerance. Carries the best estimate accumulated so far.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& msg, double best_estimate)
      : std::runtime_error(msg), best_(best_estimate) {}
  double best_estimate() const noexcept { return best_; }

 private:
  double best_;
};

namespace detail {

template <class F>
double adapt_simpson(const F& f, double a, double b, double fa, double fm,
                     double fb, double whole, double abs_tol, int depth,
                     bool& failed) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h6 = (b - a) / 12.0;
  const double left = h6 * (fa + 4.0 * flm + fm);
  const double right = h6 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // Conservative acceptance (no 15x credit): the Richardson-corrected result
  // is then well inside the requested tolerance, so halving the tolerance
  // moves tabulated values by less than the coarser tolerance.
  if (std::abs(delta) <= abs_tol || (b - a) < 1e-300) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    failed = true;
    return left + right + delta / 15.0;
  }
  return adapt_simpson(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1,
                       failed) +
         adapt_simpson(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1,
                       failed);
}

}  // namespace detail

// Adaptive Simpson quadrature with a relative tolerance. The absolute
// acceptance threshold is anchored to a coarse first-pass estimate of the
// integral; an all-zero (underflowed) integrand short-circuits to 0.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double rel_tol,
                          int max_depth = 48) {
  if (!(rel_tol > 0.0)) throw std::domain_error("integrate_adaptive: rel_tol must be > 0");
  if (a == b) return 0.0;

  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  // Coarse scale estimate from a 9-point composite Simpson pass.
  double scale = 0.0;
  {
    const int n = 8;
    const double h = (b - a) / n;
    double s = fa + fb;
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    scale = std::abs(s * h / 3.0);
  }
  if (scale == 0.0 && fa == 0.0 && fb == 0.0 && fm == 0.0) return 0.0;
  const double abs_tol = std::max(scale * rel_tol, 1e-300);

  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  bool failed = false;
  const double result =
      detail::adapt_simpson(f, a, b, fa, fm, fb, whole, abs_tol, max_depth, failed);
  if (failed) {
    throw QuadratureError("adaptive quadrature did not converge within depth limit",
                          result);
  }
  return result;
}

}  // namespace fbcool
