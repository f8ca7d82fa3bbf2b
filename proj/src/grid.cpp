#include "fbcool/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace fbcool {

void GridSpec::validate() const {
  if (n_points < 32 || (n_points & (n_points - 1)) != 0)
    throw std::domain_error("grid: n_points must be a power of two >= 32");
  if (!(length > 0.0)) throw std::domain_error("grid: length must be > 0");
}

ArrayXr GridSpec::xi() const {
  ArrayXr out(n_points);
  const double h = dxi();
  for (int i = 0; i < n_points; ++i) out[i] = -0.5 * length + i * h;
  return out;
}

ArrayXr GridSpec::k_fft() const {
  ArrayXr out(n_points);
  const double step = dk();
  for (int i = 0; i < n_points; ++i) {
    const int m = (i <= n_points / 2) ? i : i - n_points;
    out[i] = step * m;
  }
  return out;
}

Spectral::Spectral(const GridSpec& grid) {
  grid.validate();
  n_ = grid.n_points;
  bitrev_.resize(n_);
  int log2n = 0;
  while ((1 << log2n) < n_) ++log2n;
  for (int i = 0; i < n_; ++i) {
    int rev = 0;
    for (int b = 0; b < log2n; ++b)
      if (i & (1 << b)) rev |= 1 << (log2n - 1 - b);
    bitrev_[i] = rev;
  }
  twiddle_fwd_.resize(n_ - 1);
  twiddle_inv_.resize(n_ - 1);
  for (int half = 1; half < n_; half <<= 1) {
    for (int i = 0; i < half; ++i) {
      const double angle = -pi * i / half;
      twiddle_fwd_[half - 1 + i] = Complex(std::cos(angle), std::sin(angle));
      twiddle_inv_[half - 1 + i] = std::conj(twiddle_fwd_[half - 1 + i]);
    }
  }
}

void Spectral::transform(ArrayXc& data, bool inverse) const {
  if (data.size() != n_)
    throw std::invalid_argument("Spectral: data size does not match grid");
  const Complex* tw_base = (inverse ? twiddle_inv_ : twiddle_fwd_).data();
  Complex* a = data.data();
  for (int i = 0; i < n_; ++i) {
    const int j = bitrev_[i];
    if (j > i) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n_; len <<= 1) {
    const int half = len >> 1;
    const Complex* tw = tw_base + (half - 1);
    // twiddle held in registers while sweeping the blocks
    for (int i = 0; i < half; ++i) {
      const double wr = tw[i].real();
      const double wi = tw[i].imag();
      for (int j = i; j < n_; j += len) {
        double* u = reinterpret_cast<double*>(a + j);
        double* v = reinterpret_cast<double*>(a + j + half);
        const double tr = v[0] * wr - v[1] * wi;
        const double ti = v[0] * wi + v[1] * wr;
        v[0] = u[0] - tr;
        v[1] = u[1] - ti;
        u[0] += tr;
        u[1] += ti;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / n_;
    for (int i = 0; i < n_; ++i) a[i] *= scale;
  }
}

void Spectral::forward(ArrayXc& data) const { transform(data, false); }
void Spectral::inverse(ArrayXc& data) const { transform(data, true); }

}  // namespace fbcool
