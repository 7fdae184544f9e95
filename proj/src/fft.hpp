#pragma once

// Thin FFTW wrapper: complex-to-complex transforms of arbitrary length with a
// per-thread plan cache. Planner calls are serialized; execution is not.

#include <complex>
#include <cstddef>
#include <span>

namespace cmbo::detail {

/// out_j = sum_i in_i exp(-2 pi i i j / n) (unnormalized forward DFT).
void dft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

/// out_i = sum_j in_j exp(+2 pi i i j / n) (unnormalized inverse DFT).
void dft_backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

}  // namespace cmbo::detail
