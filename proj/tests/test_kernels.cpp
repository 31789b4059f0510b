#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "fraclab/grid.hpp"
#include "fraclab/kernels.hpp"

using namespace fraclab;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

double cauchy(double x, double t) {
    return (1.0 / std::numbers::pi) * t / (t * t + x * x);
}
}  // namespace

TEST_CASE("gaussian kernel closed form and normalization") {
    CHECK(gaussian_kernel(0.0, 1.0 / (4.0 * std::numbers::pi)) == doctest::Approx(1.0));
    CHECK_THROWS(gaussian_kernel(0.0, 0.0));
    Grid1D g(-30.0, 60.0, 2048, Geometry::TruncatedLine);
    Field u = sample(g, [](double x) { return gaussian_kernel(x, 2.0); });
    CHECK(mass(u) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gaussian semigroup under discrete convolution") {
    Grid1D g(-40.0, 80.0, 2048, Geometry::Periodic);
    Field a = sample(g, [](double x) { return gaussian_kernel(x, 1.5); });
    Field b = heat_convolve(a, 2.5, 1.0);
    double worst = 0.0;
    for (int j = 0; j < g.n; ++j) worst = std::max(worst, std::abs(b[j] - gaussian_kernel(g.x(j), 4.0)));
    CHECK(worst < 1e-8);
}

TEST_CASE("periodic kernel table: mass, symmetry, positivity, semigroup") {
    for (double s : {0.25, 0.5, 0.75}) {
        // box/resolution chosen to satisfy the Nyquist decay bound per s
        Grid1D g = s < 0.5 ? Grid1D(-8.0, 16.0, 4096, Geometry::Periodic)
                           : Grid1D(-64.0, 128.0, 2048, Geometry::Periodic);
        KernelTable tab = fractional_heat_kernel(g, 1.0, s);
        double m = 0.0;
        for (double v : tab.values) {
            m += v * g.dx();
            CHECK(v >= -1e-12);
        }
        CHECK(m == doctest::Approx(1.0).epsilon(1e-8));
        for (int j = 1; j < g.n / 2; ++j)
            CHECK(tab.values[g.n / 2 + j] == doctest::Approx(tab.values[g.n / 2 - j]).epsilon(1e-10));
    }
    // P_t * P_tau = P_{t+tau} through spectral convolution
    Grid1D g(-64.0, 128.0, 2048, Geometry::Periodic);
    KernelTable t1 = fractional_heat_kernel(g, 1.0, 0.5);
    Field f(g);
    f.values = t1.values;
    Field conv = heat_convolve(f, 0.7, 0.5);
    KernelTable t2 = fractional_heat_kernel(g, 1.7, 0.5);
    double worst = 0.0;
    for (int j = 0; j < g.n; ++j) worst = std::max(worst, std::abs(conv[j] - t2.values[j]));
    CHECK(worst < 1e-8);
}

TEST_CASE("aliasing check names the required resolution") {
    Grid1D g(-64.0, 128.0, 128, Geometry::Periodic);
    CHECK_THROWS_WITH_AS(fractional_heat_kernel(g, 0.5, 0.25),
                         doctest::Contains("need dx"), std::invalid_argument);
}

TEST_CASE("free-space kernel reproduces the Cauchy law at s=1/2") {
    for (double t : {0.5, 1.0, 2.0}) {
        double worst = 0.0;
        for (double x = 0.0; x <= 20.0001; x += 0.125) {
            double rel = std::abs(freespace_heat_kernel(x, t, 0.5) - cauchy(x, t)) / cauchy(x, t);
            worst = std::max(worst, rel);
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("free-space kernel periodized over images reproduces the table") {
    for (double s : {0.25, 0.75}) {
        Grid1D g = s < 0.5 ? Grid1D(-8.0, 16.0, 4096, Geometry::Periodic)
                           : Grid1D(-128.0, 256.0, 4096, Geometry::Periodic);
        KernelTable tab = fractional_heat_kernel(g, 1.0, s);
        for (int j = g.n / 2 - 80; j <= g.n / 2 + 80; j += 8) {
            double x = g.x(j);
            double folded = 0.0;
            for (int p = -12; p <= 12; ++p)
                folded += freespace_heat_kernel(x + p * g.length, 1.0, s);
            // remaining images via the power tail: P ~ c y^{-1-2s}, so
            // sum_{|p|>P} ~ 2 int = 2 P(Y) Y / (2s) at Y = (P+1/2)L
            double y = 12.5 * g.length;
            folded += 2.0 * freespace_heat_kernel(y, 1.0, s) * y / (2.0 * s * g.length);
            CHECK(tab.values[j] == doctest::Approx(folded).epsilon(2e-3));
        }
    }
}

TEST_CASE("envelope brackets the kernel with a modest band") {
    for (double s : {0.25, 0.5, 0.75}) {
        for (double t : {0.5, 1.0, 2.0}) {
            double lo = kInf, hi = 0.0;
            for (double x = 0.0; x <= 50.0001; x += 0.25) {
                double ratio = freespace_heat_kernel(x, t, s) / bg_envelope(x, t, s);
                CHECK(ratio > 0.0);
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
            CHECK(hi / lo < 100.0);
        }
    }
}

TEST_CASE("exact envelope ratio 1/pi at s=1/2") {
    for (double x : {0.0, 1.0, 7.5, 30.0}) {
        double ratio = cauchy(x, 2.0) / bg_envelope(x, 2.0, 0.5);
        CHECK(ratio == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
    }
}

TEST_CASE("kernel tail slope is -(1+2s)") {
    for (double s : {0.25, 0.5, 0.75}) {
        double lo = s < 0.4 ? 1e3 : 20.0;
        double hi = s < 0.4 ? 1e4 : 200.0;
        const int npts = 25;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < npts; ++i) {
            double x = lo * std::pow(hi / lo, i / (npts - 1.0));
            double lx = std::log(x), ly = std::log(freespace_heat_kernel(x, 1.0, s));
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        }
        double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
        CHECK(slope == doctest::Approx(-(1.0 + 2.0 * s)).epsilon(0.02));
    }
}

TEST_CASE("convolution smoothing decay exponent -1/(2s)") {
    Grid1D g(-512.0, 1024.0, 4096, Geometry::Periodic);
    Field u0 = sample(g, [](double x) { return std::abs(x) < 1.0 ? 1.0 : 0.0; });
    for (double s : {0.5, 0.75}) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (double t = 1.0; t <= 100.001; t *= std::sqrt(10.0)) {
            Field u = heat_convolve(u0, t, s);
            double lx = std::log(t), ly = std::log(lp_norm(u, kInf));
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly; ++cnt;
        }
        double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        CHECK(slope == doctest::Approx(-0.5 / s).epsilon(0.05));
    }
}

TEST_CASE("renormalized gaussian CLT error decays") {
    Grid1D g(-256.0, 512.0, 4096, Geometry::Periodic);
    // two bumps with zero first moment so the Gaussian limit is centered
    Field u0 = sample(g, [](double x) {
        return (std::abs(x - 2.0) < 0.25 ? 1.0 : 0.0) + (std::abs(x + 1.0) < 0.5 ? 1.0 : 0.0);
    });
    double m0 = mass(u0);
    double prev = kInf;
    for (double t : {10.0, 30.0, 100.0}) {
        Field u = heat_convolve(u0, t, 1.0);
        double err = 0.0;
        for (int j = 0; j < g.n; ++j)
            err = std::max(err, std::abs(u[j] - m0 * gaussian_kernel(g.x(j), t)));
        err *= std::sqrt(t);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("heat_convolve conserves mass, contracts sup, preserves sign") {
    Grid1D g(-32.0, 64.0, 1024, Geometry::Periodic);
    Field u0 = sample(g, [](double x) { return std::exp(-x * x) * (1.0 + 0.5 * std::sin(3 * x)); });
    Field u = heat_convolve(u0, 3.0, 0.6);
    CHECK(mass(u) == doctest::Approx(mass(u0)).epsilon(1e-13));
    CHECK(lp_norm(u, kInf) <= lp_norm(u0, kInf));
    for (double v : u.values) CHECK(v >= -1e-12);
    CHECK_THROWS(heat_convolve(u0, -1.0, 0.6));
    Field same = heat_convolve(u0, 0.0, 0.6);
    for (int j = 0; j < g.n; ++j) CHECK(same[j] == u0[j]);
}
