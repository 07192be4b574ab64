#pragma once

#include <cstddef>
#include <vector>

#include "gemeit/envelope.hpp"

namespace gemeit {

// In-place unnormalized forward DFT: X_k = sum_n x_n e^{-2 pi i k n / N}.
void fft_forward(std::vector<cplx>& data);
// In-place inverse DFT including the 1/N normalization.
void fft_inverse(std::vector<cplx>& data);

// Frequencies (cycles per unit of dt) in FFT bin order, negative half wrapped.
std::vector<double> fft_freqs(std::size_t n, double dt);

} // namespace gemeit
