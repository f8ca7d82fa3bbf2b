#pragma once

// Test-side reference machinery, kept independent of the library's
// integration path: tanh-sinh (double-exponential) quadrature instead of
// adaptive Simpson, plus closed-form Gaussian moments.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracle {

// Tanh-sinh quadrature on (a, b). Handles integrable endpoint singularities
// natively, which lets the reference evaluate the raw shell integrand without
// the production code's trigonometric substitution.
inline double tanh_sinh(const std::function<double(double)>& f, double a,
                        double b, double rel_tol = 1e-12) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double t_max = 3.8;  // abscissas within ~1e-300 of the endpoints

  auto pass = [&](double h) {
    double sum = 0.0;
    const int n = static_cast<int>(std::floor(t_max / h));
    for (int i = -n; i <= n; ++i) {
      const double t = i * h;
      const double u = 0.5 * 3.14159265358979323846 * std::sinh(t);
      const double x = std::tanh(u);
      const double w = 0.5 * 3.14159265358979323846 * std::cosh(t) /
                       (std::cosh(u) * std::cosh(u));
      const double xx = mid + half * x;
      if (xx <= a || xx >= b) continue;  // endpoint underflow guard
      sum += w * f(xx);
    }
    return sum * half * h;
  };

  double h = 0.5;
  double prev = pass(h);
  for (int level = 0; level < 10; ++level) {
    h *= 0.5;
    const double cur = pass(h);
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur) + 1e-300) return cur;
    prev = cur;
  }
  throw std::runtime_error("oracle::tanh_sinh failed to converge");
}

// gamma~ large-w form via tanh-sinh on the (truncated) infinite range.
inline double gamma_gaussian(double kappa, double w, double rel_tol = 1e-12) {
  const double limit = std::sqrt(42.0 / w);
  auto f = [kappa, w](double ky) {
    const double s = kappa * kappa + ky * ky;
    return std::exp(-w * ky * ky - 0.25 * w * s * s);
  };
  return 2.0 * tanh_sinh(f, 0.0, limit, rel_tol);
}

// gamma~ full form straight off the shell integrand, endpoint singularity
// included (tanh-sinh absorbs it).
inline double gamma_full(double kappa, double w, double rel_tol = 1e-12) {
  const double s2 = 1.0 - kappa * kappa;
  const double limit = std::sqrt(s2);
  auto f = [kappa, w, s2](double ky) {
    const double kz2 = s2 - ky * ky;
    if (kz2 <= 0.0) return 0.0;
    const double kz = std::sqrt(kz2);
    const double d = 1.0 - kz;
    return std::exp(-w * (d * d + ky * ky)) / kz;
  };
  return 2.0 * tanh_sinh(f, 0.0, limit, rel_tol);
}

// int_{-1}^{1} kappa^n gamma~ dkappa, nested tanh-sinh.
inline double kernel_moment_gaussian(int n, double w, double rel_tol = 1e-9) {
  auto f = [n, w](double kappa) {
    return std::pow(kappa, n) * gamma_gaussian(kappa, w, 1e-12);
  };
  return tanh_sinh(f, -1.0, 1.0, rel_tol);
}

// int_{-1}^{1} g(gamma~(kappa)) dkappa for arbitrary g, gaussian kernel.
inline double kernel_integral_gaussian(
    const std::function<double(double)>& g_of_gamma, double w,
    double rel_tol = 1e-9) {
  auto f = [&](double kappa) { return g_of_gamma(gamma_gaussian(kappa, w, 1e-12)); };
  return tanh_sinh(f, -1.0, 1.0, rel_tol);
}

// Moments of psi ~ exp(-(x-a)^2/(4 s2) + i p0 x + i beta x^2):
//   <x> = a, Var x = s2, <p> = p0 + 2 beta a,
//   <p x + x p> = 2 [p0 a + 2 beta (s2 + a^2)].
struct ChirpedGaussian {
  double a = 0.0, s2 = 0.5, p0 = 0.0, beta = 0.0;
  double mean_x() const { return a; }
  double mean_x2() const { return s2 + a * a; }
  double mean_p() const { return p0 + 2.0 * beta * a; }
  double sym_xp() const { return 2.0 * (p0 * a + 2.0 * beta * (s2 + a * a)); }
  double mean_p2() const {
    // 1/(4 s2) + 4 beta^2 s2 from the squeezed quadrature, plus <p>^2.
    const double vp = 1.0 / (4.0 * s2) + 4.0 * beta * beta * s2;
    return vp + mean_p() * mean_p();
  }
  double energy() const { return 0.5 * (mean_x2() + mean_p2()); }
};

}  // namespace oracle
