#pragma once

#include <vector>

#include "gpx/util.hpp"

namespace gpx {

/// In-place forward DFT, X_k = sum_j x_j e^{-2 pi i jk/N}, N a power of two.
void fft(std::vector<cplx>& a);

/// In-place inverse, normalized by 1/N; fft followed by ifft is the identity.
void ifft(std::vector<cplx>& a);

/// Trigonometric interpolation onto a grid refined by `factor` (power of two).
std::vector<cplx> upsample(const std::vector<cplx>& a, int factor);

} // namespace gpx
