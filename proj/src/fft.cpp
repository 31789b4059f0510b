#include "fraclab/fft.hpp"

#include <numbers>
#include <stdexcept>

namespace fraclab {

void fft(cvec& a, bool inverse) {
    const size_t n = a.size();
    if (!is_power_of_two(static_cast<int>(n)))
        throw std::invalid_argument("fft: size must be a power of two");
    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                auto u = a[i + k];
                auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& z : a) z /= static_cast<double>(n);
    }
}

cvec fft_forward(const std::vector<double>& x) {
    cvec a(x.begin(), x.end());
    fft(a, false);
    return a;
}

std::vector<double> fft_inverse_real(cvec spectrum) {
    fft(spectrum, true);
    std::vector<double> out(spectrum.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = spectrum[i].real();
    return out;
}

double wavenumber(const Grid1D& g, int k) {
    int kk = k <= g.n / 2 ? k : k - g.n;
    return 2.0 * std::numbers::pi * kk / g.length;
}

Field apply_symbol(const Field& f, const std::function<double(double)>& sigma) {
    if (f.grid.geometry != Geometry::Periodic)
        throw std::invalid_argument("apply_symbol: periodic grid required");
    cvec spec = fft_forward(f.values);
    for (int k = 0; k < f.grid.n; ++k) spec[k] *= sigma(std::abs(wavenumber(f.grid, k)));
    Field out(f.grid, f.time);
    out.values = fft_inverse_real(std::move(spec));
    return out;
}

}  // namespace fraclab
