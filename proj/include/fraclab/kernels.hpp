// Heat propagators: Gaussian and fractional heat kernels, spectral
// convolution, and the fat-tail envelope.
#pragma once

#include "fraclab/grid.hpp"

namespace fraclab {

// (4 pi t)^{-N/2} exp(-|x|^2 / 4t); rejects t <= 0.
double gaussian_kernel(double x, double t, int N = 1);

// Fat-tail envelope t / (t^{1/s} + |x|^2)^{(N+2s)/2}; the true kernel
// stays within constant multiples of this for all x and t.
double bg_envelope(double x, double t, double s, int N = 1);

struct KernelTable {
    double s = 0.5;
    double t = 1.0;
    Grid1D grid;
    std::vector<double> values;
};

// Kernel sampled on a periodic grid by inverse transform of the symbol
// exp(-t |xi|^{2s}). Errors out (naming the required resolution) when
// the symbol at the Nyquist mode exceeds 1e-12, since the samples are
// then aliased.
KernelTable fractional_heat_kernel(const Grid1D& g, double t, double s);

// Pointwise free-space kernel P_t(x) = (1/pi) int_0^inf
// exp(-t xi^{2s}) cos(x xi) dxi, computed by a Filon-type panel
// quadrature: the oscillation is integrated exactly against a panelwise
// quadratic fit of the envelope, with geometric refinement toward
// xi = 0 where the envelope has a fractional cusp. Accurate tail values
// at large |x| come from that refinement, not from any asymptotic
// formula. s = 1 falls back to the Gaussian.
double freespace_heat_kernel(double x, double t, double s);

// Spectral multiplication by exp(-t |xi|^{2s}); exact discrete
// convolution with the periodic kernel table. s in (0,1], t >= 0.
Field heat_convolve(const Field& u0, double t, double s);

}  // namespace fraclab
