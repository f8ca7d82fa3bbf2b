#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fbcool/rng.hpp"
#include "fbcool/state.hpp"
#include "oracles.hpp"

using namespace fbcool;

namespace {

Wavefunction chirped(const GridSpec& grid, const oracle::ChirpedGaussian& g) {
  Wavefunction psi{grid, ArrayXc(grid.n_points)};
  const ArrayXr xi = grid.xi();
  for (int i = 0; i < grid.n_points; ++i) {
    const double d = xi[i] - g.a;
    const double phase = g.p0 * xi[i] + g.beta * xi[i] * xi[i];
    psi.amplitudes[i] =
        std::exp(-d * d / (4.0 * g.s2)) * Complex(std::cos(phase), std::sin(phase));
  }
  normalize(psi);
  return psi;
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("spec validation and derived quantities") {
    GridSpec g{512, 40.0};
    g.validate();
    CHECK(g.dxi() == doctest::Approx(40.0 / 512));
    CHECK(g.nyquist_k() == doctest::Approx(pi * 512 / 40.0));
    CHECK_THROWS_AS((GridSpec{100, 40.0}).validate(), std::domain_error);
    CHECK_THROWS_AS((GridSpec{16, 40.0}).validate(), std::domain_error);
    CHECK_THROWS_AS((GridSpec{64, -1.0}).validate(), std::domain_error);
  }

  TEST_CASE("fft roundtrip, Parseval, plane-wave localization") {
    GridSpec g{128, 20.0};
    Spectral sp(g);
    RngStream stream(3, 3);
    ArrayXc data(g.n_points);
    for (int i = 0; i < g.n_points; ++i)
      data[i] = Complex(stream.normal(), stream.normal());
    const ArrayXc original = data;
    sp.forward(data);
    const double sum_time = original.abs2().sum();
    const double sum_freq = data.abs2().sum() / g.n_points;
    CHECK(sum_freq == doctest::Approx(sum_time).epsilon(1e-12));
    sp.inverse(data);
    CHECK((data - original).abs().maxCoeff() < 1e-12);

    // exp(i k_m xi) lands on bin m
    const int m = 9;
    const ArrayXr xi = g.xi();
    for (int i = 0; i < g.n_points; ++i) {
      const double phase = g.dk() * m * xi[i];
      data[i] = Complex(std::cos(phase), std::sin(phase));
    }
    sp.forward(data);
    double peak = 0.0;
    int peak_at = -1;
    for (int i = 0; i < g.n_points; ++i)
      if (std::abs(data[i]) > peak) {
        peak = std::abs(data[i]);
        peak_at = i;
      }
    CHECK(peak_at == m);
    CHECK(peak == doctest::Approx(g.n_points).epsilon(1e-10));
  }
}

TEST_SUITE("state") {
  TEST_CASE("gaussian construction: norm, ground state, displacement") {
    GridSpec g{512, 40.0};
    Spectral sp(g);
    const Wavefunction ground = make_gaussian(g, 0.0, 0.5);
    CHECK(norm_squared(ground) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(energy(ground, sp) == doctest::Approx(0.5).epsilon(1e-10));

    const Wavefunction displaced = make_gaussian(g, 2.0, 0.5);
    CHECK(expect_x_power(displaced, 1) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(expect_x_power(displaced, 2) == doctest::Approx(4.5).epsilon(1e-10));
    CHECK(expect_p(displaced, sp) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(energy(displaced, sp) == doctest::Approx(2.5).epsilon(1e-10));

    CHECK_THROWS_AS(make_gaussian(g, 19.5, 0.5), std::domain_error);
  }

  TEST_CASE("first excited oscillator state has energy 3/2") {
    GridSpec g{512, 40.0};
    Spectral sp(g);
    Wavefunction psi{g, ArrayXc(g.n_points)};
    const ArrayXr xi = g.xi();
    for (int i = 0; i < g.n_points; ++i)
      psi.amplitudes[i] = xi[i] * std::exp(-0.5 * xi[i] * xi[i]);
    normalize(psi);
    CHECK(energy(psi, sp) == doctest::Approx(1.5).epsilon(1e-10));
  }

  TEST_CASE("plane-wave boost reads back as momentum") {
    GridSpec g{512, 40.0};
    Spectral sp(g);
    Wavefunction psi = make_gaussian(g, 0.0, 0.5);
    const ArrayXr xi = g.xi();
    const double p0 = 1.5;
    for (int i = 0; i < g.n_points; ++i)
      psi.amplitudes[i] *= Complex(std::cos(p0 * xi[i]), std::sin(p0 * xi[i]));
    CHECK(expect_p(psi, sp) == doctest::Approx(p0).epsilon(1e-8));
    CHECK(expect_sym_xp(psi, sp, 1) == doctest::Approx(2.0 * p0).epsilon(1e-8));
  }

  TEST_CASE("symmetric moments against the chirped-Gaussian closed form") {
    GridSpec g{512, 40.0};
    Spectral sp(g);
    oracle::ChirpedGaussian ref{1.0, 0.5, 0.7, 0.3};
    const Wavefunction psi = chirped(g, ref);
    CHECK(expect_x_power(psi, 1) == doctest::Approx(ref.mean_x()).epsilon(1e-9));
    CHECK(expect_p(psi, sp) == doctest::Approx(ref.mean_p()).epsilon(1e-9));
    CHECK(expect_sym_xp(psi, sp, 2) == doctest::Approx(ref.sym_xp()).epsilon(1e-9));
    CHECK(energy(psi, sp) == doctest::Approx(ref.energy()).epsilon(1e-9));
  }

  TEST_CASE("stationary states have vanishing symmetric moments") {
    GridSpec g{512, 40.0};
    Spectral sp(g);
    const Wavefunction ground = make_gaussian(g, 0.0, 0.5);
    CHECK(expect_p(ground, sp) == doctest::Approx(0.0).epsilon(1e-12));
    for (int n = 1; n <= 4; ++n)
      CHECK(expect_sym_xp(ground, sp, n) == doctest::Approx(0.0).epsilon(1e-10));
  }

  TEST_CASE("unnormalized states are rejected by expectation contracts") {
    GridSpec g{512, 40.0};
    Spectral sp(g);
    Wavefunction psi = make_gaussian(g, 0.0, 0.5);
    psi.amplitudes *= 1.5;
    CHECK_THROWS_AS(expect_x_power(psi, 2), std::logic_error);
    CHECK_THROWS_AS(energy(psi, sp), std::logic_error);
  }

  TEST_CASE("split-step primitives preserve the norm to 1e-12") {
    GridSpec g{256, 30.0};
    Spectral sp(g);
    Wavefunction psi = make_gaussian(g, 1.0, 0.5);
    kinetic_half_step(psi, sp, 1e-2);
    CHECK(norm_squared(psi) == doctest::Approx(1.0).epsilon(1e-12));
    const ArrayXr v = 0.5 * g.xi().square();
    potential_half_step(psi, v, 1e-2);
    CHECK(norm_squared(psi) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("free spreading matches the analytic variance") {
    GridSpec g{512, 40.0};
    Spectral sp(g);
    Wavefunction psi = make_gaussian(g, 0.0, 0.5);
    const double dt = 1e-3;
    // kinetic-only evolution: chain half steps into tau = 1
    for (int k = 0; k < 2000; ++k) kinetic_half_step(psi, sp, dt);
    const double var = expect_x_power(psi, 2);
    // sigma^2(tau) = sigma0^2 + tau^2 Var p = 0.5 + 1 * 0.5
    CHECK(var == doctest::Approx(1.0).epsilon(1e-8));
  }

  TEST_CASE("harmonic Strang cycle revives after one period") {
    GridSpec g{256, 30.0};
    Spectral sp(g);
    Wavefunction psi = make_gaussian(g, 2.0, 0.5);
    const Wavefunction start = psi;
    const double dt = 1e-3;
    const int steps = static_cast<int>(std::round(2.0 * pi / dt));
    const ArrayXr v = 0.5 * g.xi().square();
    const ArrayXc kin = kinetic_half_phase(g, dt);
    for (int k = 0; k < steps; ++k) {
      apply_kinetic_phase(psi, sp, kin);
      potential_half_step(psi, v, dt);
      potential_half_step(psi, v, dt);
      apply_kinetic_phase(psi, sp, kin);
    }
    // the revival time 2 pi is not an exact multiple of dt; allow the phase
    // miss of the fractional step plus the splitting error
    const Complex overlap =
        (start.amplitudes.conjugate() * psi.amplitudes).sum() * g.dxi();
    CHECK(1.0 - std::norm(overlap) < 1e-6);
  }

  TEST_CASE("snapshot dump round trip") {
    GridSpec g{64, 16.0};
    Spectral sp(g);
    Wavefunction psi = make_gaussian(g, 1.0, 0.5);
    const ArrayXr xi = g.xi();
    for (int i = 0; i < g.n_points; ++i)
      psi.amplitudes[i] *= Complex(std::cos(0.7 * xi[i]), std::sin(0.7 * xi[i]));
    std::stringstream ss;
    write_snapshot(ss, psi, 3.25);
    // header is a single JSON line; payload is raw interleaved doubles
    std::string header;
    std::getline(ss, header);
    CHECK(header.front() == '{');
    CHECK(header.find("\"n_points\":64") != std::string::npos);
    ss.seekg(0);
    double tau = 0.0;
    const Wavefunction back = read_snapshot(ss, &tau);
    CHECK(tau == 3.25);
    CHECK(back.grid.n_points == 64);
    CHECK(back.grid.length == 16.0);
    for (int i = 0; i < 64; ++i) CHECK(back.amplitudes[i] == psi.amplitudes[i]);

    std::stringstream truncated(std::string("{\"n_points\":64,\"L\":16,\"tau\":0}\n") +
                                std::string(16, 'x'));
    CHECK_THROWS_WITH_AS(read_snapshot(truncated), doctest::Contains("truncated"),
                         std::runtime_error);
  }

  TEST_CASE("containment monitor flags leaking states") {
    GridSpec g{64, 16.0};
    const Wavefunction tight = make_gaussian(g, 0.0, 0.5);
    CHECK(boundary_fraction(tight) < boundary_density_limit);
    Wavefunction wide{g, ArrayXc::Constant(64, Complex(1.0, 0.0))};
    normalize(wide);
    CHECK(boundary_fraction(wide) > boundary_density_limit);
  }
}
