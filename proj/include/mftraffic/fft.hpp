#pragma once

#include <complex>
#include <vector>

namespace mftraffic::detail {

/// In-place iterative radix-2 Cooley-Tukey transform.
/// Size must be a power of two. Forward uses e^{-2πi jk/N}; the inverse
/// applies the conjugate kernel and divides by N.
void fft(std::vector<std::complex<double>>& a, bool inverse = false);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

}  // namespace mftraffic::detail
