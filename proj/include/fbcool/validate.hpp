#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fbcool {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Hermitian symmetry of the Fourier noise (exact), sampled dW~* dW~
// correlations within 2% over the requested number of steps, cross moments
// consistent with zero at 4 sigma.
std::vector<CheckResult> noise_statistics_checks(std::uint64_t seed,
                                                 int steps = 100000);

// Kernel suite: evenness, positivity, full-vs-gaussian agreement at w = 3000
// (within 5% of the kernel peak on |kappa| <= 0.5), self-convergence under
// tolerance halving.
std::vector<CheckResult> kernel_checks();

// SSE trajectory ensemble against the unconditional density-matrix equation
// on N = 32, L = 12, alpha~ = 1, eta = 2, dt = 1e-3: <x>, <p>, energy agree
// within 3 standard errors at tau = 0.5 and tau = 1.0.
std::vector<CheckResult> unravelling_checks(int paths, int workers,
                                            std::uint64_t seed);

}  // namespace fbcool
