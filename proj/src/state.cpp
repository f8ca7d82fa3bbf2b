#include "fbcool/state.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fbcool/csv.hpp"

namespace fbcool {

namespace {

void require_normalized(const Wavefunction& psi) {
  if (std::abs(norm_squared(psi) - 1.0) > 1e-6)
    throw std::logic_error("wavefunction is not normalized");
}

}  // namespace

Wavefunction make_gaussian(const GridSpec& grid, double center, double sigma2) {
  grid.validate();
  if (!(sigma2 > 0.0)) throw std::domain_error("make_gaussian: sigma2 must be > 0");
  const double sigma = std::sqrt(sigma2);
  const double half = 0.5 * grid.length;
  if (center - 5.0 * sigma <= -half || center + 5.0 * sigma >= half)
    throw std::domain_error("make_gaussian: center +- 5 sigma leaves the grid");

  Wavefunction psi{grid, ArrayXc(grid.n_points)};
  const ArrayXr xi = grid.xi();
  for (int i = 0; i < grid.n_points; ++i) {
    const double d = xi[i] - center;
    psi.amplitudes[i] = std::exp(-d * d / (4.0 * sigma2));
  }
  normalize(psi);
  return psi;
}

double norm_squared(const Wavefunction& psi) {
  return psi.amplitudes.abs2().sum() * psi.grid.dxi();
}

void normalize(Wavefunction& psi) {
  const double n2 = norm_squared(psi);
  if (!(n2 > 0.0)) throw std::runtime_error("normalize: zero-norm state");
  psi.amplitudes /= std::sqrt(n2);
}

double boundary_fraction(const Wavefunction& psi) {
  const int n = psi.grid.n_points;
  const double peak = psi.amplitudes.abs2().maxCoeff();
  if (peak <= 0.0) return 0.0;
  const double edge = std::max(std::norm(psi.amplitudes[0]),
                               std::norm(psi.amplitudes[n - 1]));
  return edge / peak;
}

double expect_x_power(const Wavefunction& psi, int n) {
  if (n < 1 || n > 4) throw std::domain_error("expect_x_power: n must be 1..4");
  require_normalized(psi);
  const ArrayXr xi = psi.grid.xi();
  return (psi.amplitudes.abs2() * xi.pow(n)).sum() * psi.grid.dxi();
}

double expect_p(const Wavefunction& psi, const Spectral& sp) {
  require_normalized(psi);
  ArrayXc ft = psi.amplitudes;
  sp.forward(ft);
  const ArrayXr k = psi.grid.k_fft();
  const double w = psi.grid.dxi() / psi.grid.n_points;
  return (ft.abs2() * k).sum() * w;
}

double expect_p2(const Wavefunction& psi, const Spectral& sp) {
  require_normalized(psi);
  ArrayXc ft = psi.amplitudes;
  sp.forward(ft);
  const ArrayXr k = psi.grid.k_fft();
  const double w = psi.grid.dxi() / psi.grid.n_points;
  return (ft.abs2() * k.square()).sum() * w;
}

double expect_sym_xp(const Wavefunction& psi, const Spectral& sp, int n) {
  if (n < 1 || n > 4) throw std::domain_error("expect_sym_xp: n must be 1..4");
  require_normalized(psi);
  ArrayXc ft = psi.amplitudes;
  sp.forward(ft);
  ft *= psi.grid.k_fft();
  sp.inverse(ft);  // ft = (p psi)(xi)
  const ArrayXr xi_pow = n == 1 ? ArrayXr::Ones(psi.grid.n_points)
                                : ArrayXr(psi.grid.xi().pow(n - 1));
  const Complex overlap =
      (psi.amplitudes.conjugate() * xi_pow.cast<Complex>() * ft).sum() *
      psi.grid.dxi();
  return 2.0 * overlap.real();
}

double energy(const Wavefunction& psi, const Spectral& sp) {
  return 0.5 * (expect_x_power(psi, 2) + expect_p2(psi, sp));
}

ArrayXc kinetic_half_phase(const GridSpec& grid, double dt) {
  const ArrayXr k = grid.k_fft();
  ArrayXc phase(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double angle = -0.25 * k[i] * k[i] * dt;  // (k^2/2)(dt/2)
    phase[i] = Complex(std::cos(angle), std::sin(angle));
  }
  return phase;
}

void apply_kinetic_phase(Wavefunction& psi, const Spectral& sp,
                         const ArrayXc& phase) {
  sp.forward(psi.amplitudes);
  psi.amplitudes *= phase;
  sp.inverse(psi.amplitudes);
}

void kinetic_half_step(Wavefunction& psi, const Spectral& sp, double dt) {
  if (!(dt > 0.0)) throw std::domain_error("kinetic_half_step: dt must be > 0");
  const ArrayXc phase = kinetic_half_phase(psi.grid, dt);
  apply_kinetic_phase(psi, sp, phase);
}

void potential_half_step(Wavefunction& psi, const ArrayXr& potential,
                         double dt) {
  if (!(dt > 0.0)) throw std::domain_error("potential_half_step: dt must be > 0");
  if (potential.size() != psi.amplitudes.size())
    throw std::invalid_argument("potential_half_step: size mismatch");
  for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) {
    const double angle = -0.5 * potential[i] * dt;
    psi.amplitudes[i] *= Complex(std::cos(angle), std::sin(angle));
  }
}

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian");

void write_snapshot(std::ostream& os, const Wavefunction& psi, double tau) {
  os << "{\"n_points\":" << psi.grid.n_points << ",\"L\":"
     << format_g17(psi.grid.length) << ",\"tau\":" << format_g17(tau)
     << "}\n";
  os.write(reinterpret_cast<const char*>(psi.amplitudes.data()),
           static_cast<std::streamsize>(psi.grid.n_points * 2 * sizeof(double)));
}

Wavefunction read_snapshot(std::istream& is, double* tau) {
  std::string header;
  if (!std::getline(is, header))
    throw std::runtime_error("snapshot: missing header line");
  auto field = [&header](const char* key) {
    const auto pos = header.find(key);
    if (pos == std::string::npos)
      throw std::runtime_error(std::string("snapshot: header missing ") + key);
    return std::strtod(header.c_str() + pos + std::string(key).size(), nullptr);
  };
  const int n = static_cast<int>(field("\"n_points\":"));
  Wavefunction psi{GridSpec{n, field("\"L\":")}, ArrayXc(n)};
  psi.grid.validate();
  if (tau) *tau = field("\"tau\":");
  is.read(reinterpret_cast<char*>(psi.amplitudes.data()),
          static_cast<std::streamsize>(n * 2 * sizeof(double)));
  if (!is) throw std::runtime_error("snapshot: truncated amplitude block");
  return psi;
}

}  // namespace fbcool
