#pragma once

#include <vector>

#include "fbcool/types.hpp"

namespace fbcool {

// Uniform periodic grid on [-L/2, L/2). n_points must be a power of two so
// the spectral transforms stay radix-2.
struct GridSpec {
  int n_points = 512;
  double length = 40.0;

  void validate() const;
  double dxi() const { return length / n_points; }
  double dk() const { return 2.0 * pi / length; }
  double nyquist_k() const { return pi * n_points / length; }
  ArrayXr xi() const;
  // FFT-ordered momenta: 0, dk, ..., Nyquist, ..., -dk.
  ArrayXr k_fft() const;
};

// In-place radix-2 FFT with per-stage twiddle tables and a bit-reversal pass.
// Forward: X_k = sum_n x_n exp(-2 pi i k n / N); inverse includes the 1/N.
class Spectral {
 public:
  explicit Spectral(const GridSpec& grid);
  int size() const { return n_; }
  void forward(ArrayXc& data) const;
  void inverse(ArrayXc& data) const;

 private:
  void transform(ArrayXc& data, bool inverse) const;
  int n_ = 0;
  std::vector<int> bitrev_;
  // stage twiddles laid out contiguously: stage with half-length h starts at
  // offset h - 1 and holds h entries
  std::vector<Complex> twiddle_fwd_;
  std::vector<Complex> twiddle_inv_;
};

}  // namespace fbcool
