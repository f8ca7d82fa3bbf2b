#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fbcool/kernels.hpp"
#include "fbcool/quadrature.hpp"
#include "oracles.hpp"

using namespace fbcool;

TEST_SUITE("quadrature") {
  TEST_CASE("adaptive simpson on smooth integrands") {
    const double val = integrate_adaptive(
        [](double x) { return std::exp(-x * x); }, -6.0, 6.0, 1e-12);
    CHECK(val == doctest::Approx(std::sqrt(pi)).epsilon(1e-12));
    CHECK(integrate_adaptive([](double) { return 0.0; }, 0.0, 1.0, 1e-10) == 0.0);
  }

  TEST_CASE("depth exhaustion raises and carries the best estimate") {
    // interior |x - 0.3|^{-1/2} singularity (never hit exactly: 0.3 is not
    // dyadic) needs unbounded refinement; a depth cap forces failure.
    // exact integral: 2 (sqrt(0.3) + sqrt(0.7)) = 2.76865...
    bool thrown = false;
    try {
      integrate_adaptive(
          [](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0,
          1.0, 1e-14, 12);
    } catch (const QuadratureError& err) {
      thrown = true;
      CHECK(err.best_estimate() > 2.0);
      CHECK(err.best_estimate() < 3.5);
    }
    CHECK(thrown);
  }
}

TEST_SUITE("kernels") {
  TEST_CASE("gaussian kernel is even and matches the tanh-sinh oracle") {
    CHECK(gamma_tilde_gaussian(0.3, 3000.0) == gamma_tilde_gaussian(-0.3, 3000.0));
    // frozen from the oracle at 1e-12: gamma~(0, 3000)
    CHECK(gamma_tilde_gaussian(0.0, 3000.0) ==
          doctest::Approx(3.235841008580927e-02).epsilon(1e-9));
    CHECK(gamma_tilde_gaussian(0.2, 3000.0) ==
          doctest::Approx(9.650165549755979e-03).epsilon(1e-9));
    // leading order sqrt(pi/w)
    CHECK(gamma_tilde_gaussian(0.0, 3000.0) ==
          doctest::Approx(std::sqrt(pi / 3000.0)).epsilon(1e-4));
  }

  TEST_CASE("large-w ratio approaches 1 from below, monotonically") {
    double prev = 0.0;
    for (double w : {1e3, 1e4, 1e5}) {
      const double ratio = gamma_tilde_gaussian(0.0, w) * std::sqrt(w / pi);
      CHECK(ratio < 1.0);
      CHECK(ratio > prev);
      prev = ratio;
    }
    CHECK(prev == doctest::Approx(0.999998125021).epsilon(1e-8));
  }

  TEST_CASE("full kernel: oracle match, evenness, endpoint behaviour") {
    CHECK(gamma_tilde_full(0.2, 3000.0) ==
          doctest::Approx(9.607517654978349e-03).epsilon(1e-9));
    for (double k : {0.1, 0.5, 0.9})
      CHECK(gamma_tilde_full(k, 3000.0) == gamma_tilde_full(-k, 3000.0));
    const double edge = gamma_tilde_full(0.99, 3000.0);
    CHECK(std::isfinite(edge));
    CHECK(edge >= 0.0);
    CHECK_THROWS_AS(gamma_tilde_full(1.0, 3000.0), std::domain_error);
    CHECK_THROWS_AS(gamma_tilde_full(-1.2, 3000.0), std::domain_error);
  }

  TEST_CASE("full agrees with gaussian at w=3000 where the kernel has weight") {
    // pointwise at kappa = 0.2 (well inside the support)
    const double rel = std::abs(gamma_tilde_full(0.2, 3000.0) -
                                gamma_tilde_gaussian(0.2, 3000.0)) /
                       gamma_tilde_gaussian(0.2, 3000.0);
    CHECK(rel < 0.05);
    // across |kappa| <= 0.5, deviation relative to the kernel peak; a
    // pointwise ratio is meaningless out there (both tails underflow).
    KernelConfig full_cfg{3000.0, KernelMethod::full, 64, 1e-10,
                          PolarizationFactor::unity};
    KernelConfig gauss_cfg = full_cfg;
    gauss_cfg.method = KernelMethod::gaussian;
    const KernelTable tf = tabulate_kernel(full_cfg);
    const KernelTable tg = tabulate_kernel(gauss_cfg);
    const double peak = tg.gamma.maxCoeff();
    double worst = 0.0;
    for (int i = 0; i < tf.n_points(); ++i)
      if (std::abs(tf.kappa[i]) <= 0.5)
        worst = std::max(worst, std::abs(tf.gamma[i] - tg.gamma[i]) / peak);
    CHECK(worst < 0.05);
  }

  TEST_CASE("polarization hook and pancake kernel") {
    CHECK(gamma_tilde_full(0.3, 3000.0, 1e-10, PolarizationFactor::dipole) <
          gamma_tilde_full(0.3, 3000.0, 1e-10, PolarizationFactor::unity));
    CHECK(gamma_pancake(0.0, 0.0, 3000.0) == doctest::Approx(1.0));
    CHECK(gamma_pancake(0.1, 0.2, 500.0) == gamma_pancake(-0.1, -0.2, 500.0));
    CHECK_THROWS_AS(gamma_pancake(0.8, 0.7, 500.0), std::domain_error);
  }

  TEST_CASE("tabulate: symmetric nonnegative table, config validation") {
    KernelConfig cfg;
    cfg.w = 3000.0;
    cfg.n_kappa = 64;
    const KernelTable t = tabulate_kernel(cfg);
    CHECK(t.n_points() == 65);
    for (int i = 0; i < t.n_points(); ++i) {
      CHECK(t.gamma[i] >= 0.0);
      CHECK(t.gamma[i] == t.gamma[t.n_points() - 1 - i]);
      CHECK(std::isfinite(t.gamma[i]));
    }
    KernelConfig bad = cfg;
    bad.n_kappa = 63;
    CHECK_THROWS_AS(tabulate_kernel(bad), std::domain_error);
    bad = cfg;
    bad.quad_tol = 0.5;
    CHECK_THROWS_AS(tabulate_kernel(bad), std::domain_error);
  }

  TEST_CASE("self-convergence under tolerance halving") {
    KernelConfig coarse;
    coarse.w = 3000.0;
    coarse.quad_tol = 1e-6;
    KernelConfig fine = coarse;
    fine.quad_tol = 5e-7;
    const KernelTable tc = tabulate_kernel(coarse);
    const KernelTable tf = tabulate_kernel(fine);
    for (int i = 0; i < tc.n_points(); ++i) {
      const double scale = std::max(std::abs(tf.gamma[i]), 1e-30);
      CHECK(std::abs(tc.gamma[i] - tf.gamma[i]) / scale < 1e-6);
    }
  }

  TEST_CASE("moments against the nested oracle") {
    KernelConfig cfg;
    cfg.w = 3000.0;
    cfg.quad_tol = 1e-12;

    // frozen oracle values (tanh-sinh, 1e-10): M0, M2 at w = 3000
    const double m0_ref = 1.117492525830181e-02;
    const double m2_ref = 1.374179858418332e-04;

    cfg.n_kappa = 64;
    const KernelTable t64 = tabulate_kernel(cfg);
    cfg.n_kappa = 128;
    const KernelTable t128 = tabulate_kernel(cfg);
    cfg.n_kappa = 256;
    const KernelTable t256 = tabulate_kernel(cfg);

    CHECK(kernel_moment(t64, 0) == doctest::Approx(m0_ref).epsilon(2e-5));
    CHECK(kernel_moment(t64, 2) == doctest::Approx(m2_ref).epsilon(5e-5));
    CHECK(kernel_moment(t128, 2) == doctest::Approx(m2_ref).epsilon(1e-9));
    CHECK(kernel_moment(t64, 0) > 0.0);

    // the 64-interval grid is marginal for this kernel width; one doubling
    // lands it, after which Simpson is converged far below 1e-6
    const double rel_64_128 =
        std::abs(kernel_moment(t64, 2) - kernel_moment(t128, 2)) /
        kernel_moment(t128, 2);
    CHECK(rel_64_128 < 2e-5);
    const double rel_128_256 =
        std::abs(kernel_moment(t128, 2) - kernel_moment(t256, 2)) /
        kernel_moment(t256, 2);
    CHECK(rel_128_256 < 1e-6);

    CHECK_THROWS_AS(kernel_moment(t64, 1), std::domain_error);
    CHECK_THROWS_AS(kernel_moment(t64, 3), std::domain_error);

    // mirroring the table changes nothing
    KernelTable mirrored = t64;
    mirrored.kappa = (-t64.kappa).reverse().eval();
    mirrored.gamma = t64.gamma.reverse().eval();
    CHECK(kernel_moment(mirrored, 2) == doctest::Approx(kernel_moment(t64, 2)));
  }

  TEST_CASE("real-space kernel: real, even, correct at 0, Parseval") {
    KernelConfig cfg;
    cfg.w = 3000.0;
    cfg.n_kappa = 128;
    cfg.quad_tol = 1e-12;
    const KernelTable table = tabulate_kernel(cfg);
    const double eta = 6.0;

    const int n = 2048;
    const double span = 30.0;
    ArrayXr xi(n);
    for (int i = 0; i < n; ++i) xi[i] = -span + 2.0 * span * i / n;
    const ArrayXr g = kernel_realspace(table, eta, xi);

    // evenness on the sampled grid (xi[0] pairs beyond the end; skip it)
    for (int i = 1; i < n; ++i)
      CHECK(g[i] == doctest::Approx(g[n - i]).epsilon(1e-10));

    // value at 0: sqrt(3 eta / 8 pi) / sqrt(2 pi) * int sqrt(gamma~)
    // (frozen oracle integral at w = 3000: 7.394344099813174e-02)
    ArrayXr zero(1);
    zero[0] = 0.0;
    const double g0 = kernel_realspace(table, eta, zero)[0];
    const double expected0 = std::sqrt(3.0 * eta / (8.0 * pi)) /
                             std::sqrt(2.0 * pi) * 7.394344099813174e-02;
    CHECK(g0 == doctest::Approx(expected0).epsilon(1e-7));

    // Parseval: int Gamma~^2 dxi = (3 / 8 pi) int gamma~ dkappa
    const double dxi = 2.0 * span / n;
    const double lhs = (g * g).sum() * dxi;
    const double rhs = 3.0 / (8.0 * pi) * 1.117492525830181e-02;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
  }

  TEST_CASE("csv export format") {
    KernelConfig cfg;
    cfg.n_kappa = 8;
    cfg.w = 100.0;
    const KernelTable t = tabulate_kernel(cfg);
    std::ostringstream os;
    write_kernel_csv(os, t);
    const std::string text = os.str();
    CHECK(text.substr(0, 12) == "kappa,gamma\n");
    CHECK(text.find("\r") == std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 10);  // header + 9 rows
    // full double precision round-trips
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    std::getline(is, line);
    const double back = std::strtod(line.substr(line.find(',') + 1).c_str(), nullptr);
    CHECK(back == t.gamma[0]);
  }
}
