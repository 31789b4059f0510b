// Radix-2 complex FFT and spectral helpers for periodic grids.
#pragma once

#include <complex>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

using cvec = std::vector<std::complex<double>>;

// In-place iterative radix-2 transform; size must be a power of two.
void fft(cvec& a, bool inverse);

// Forward DFT of real samples (length n, power of two).
cvec fft_forward(const std::vector<double>& x);

// Inverse DFT, returning the real part (imaginary residue discarded).
std::vector<double> fft_inverse_real(cvec spectrum);

// Box wavenumber for spectral index k on a periodic grid:
// xi_k = 2*pi*k'/L with k' = k for k <= n/2, k-n otherwise.
double wavenumber(const Grid1D& g, int k);

// Apply a real symbol sigma(|xi_k|) mode-by-mode on a periodic field.
Field apply_symbol(const Field& f, const std::function<double(double)>& sigma);

}  // namespace fraclab
