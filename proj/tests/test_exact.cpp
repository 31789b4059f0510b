#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fraclab/exact.hpp"
#include "fraclab/fft.hpp"
#include "fraclab/grid.hpp"
#include "fraclab/nonlocal.hpp"

using namespace fraclab;

namespace {
double sq(double v) { return v * v; }
double logistic(double u) { return u * (1.0 - u); }
double logistic_prime(double u) { return 1.0 - 2.0 * u; }
}  // namespace

TEST_CASE("slow-diffusion exponents") {
    auto [a2, b2] = pme_exponents(2.0, 1);
    CHECK(a2 == doctest::Approx(1.0 / 3.0));
    CHECK(b2 == doctest::Approx(1.0 / 3.0));
    auto [a3, b3] = pme_exponents(3.0, 1);
    CHECK(a3 == doctest::Approx(0.25));
    CHECK(b3 == doctest::Approx(0.25));
    auto [a1, b1] = pme_exponents(1.0 + 1e-9, 1);
    CHECK(a1 == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(b1 == doctest::Approx(0.5).epsilon(1e-6));
    CHECK_THROWS(pme_exponents(1.0, 1));
    auto [af, bf] = fde_exponents(0.5, 1);
    CHECK(bf == doctest::Approx(1.0 / 1.5));
    CHECK(bf > 0.5);
    CHECK(af == doctest::Approx(bf));
    CHECK_THROWS(fde_exponents(-1.0, 1));
}

TEST_CASE("source solution: frozen constants at m=2, unit mass") {
    // k = (m-1) beta / 2m = 1/12; C = (sqrt(k)/I)^{2/3} with I = 4/3
    double u0 = pme_barenblatt(0.0, 1.0, 2.0, 1, 1.0);
    CHECK(u0 == doctest::Approx(std::pow(std::sqrt(1.0 / 12.0) * 0.75, 2.0 / 3.0)).epsilon(1e-12));
    CHECK(u0 == doctest::Approx(0.36).epsilon(2e-3));
    CHECK(pme_support_edge(1.0, 2.0, 1, 1.0) == doctest::Approx(2.078).epsilon(1e-3));
    CHECK(pme_support_edge(8.0, 2.0, 1, 1.0) ==
          doctest::Approx(2.0 * pme_support_edge(1.0, 2.0, 1, 1.0)).epsilon(1e-12));
}

TEST_CASE("source solution conserves calibrated mass") {
    for (double M : {1.0, 2.5}) {
        for (double t : {1.0, 5.0}) {
            Grid1D g(-10.0, 20.0, 4096, Geometry::TruncatedLine);
            Field u = sample(g, [&](double x) { return pme_barenblatt(x, t, 2.0, 1, M); });
            CHECK(mass(u) == doctest::Approx(M).epsilon(1e-6));
        }
    }
}

TEST_CASE("source solution satisfies the equation to second order") {
    double worst_ratio = 0.0;
    double prev = 0.0;
    for (double dx : {4e-3, 2e-3}) {
        double edge = pme_support_edge(1.0, 2.0, 1, 1.0);
        double res = 0.0;
        const double dt = 1e-6;
        for (double x = -0.8 * edge; x <= 0.8 * edge; x += dx) {
            double ut = (pme_barenblatt(x, 1.0 + dt, 2.0, 1, 1.0) -
                         pme_barenblatt(x, 1.0 - dt, 2.0, 1, 1.0)) /
                        (2.0 * dt);
            auto um = [&](double y) { return std::pow(pme_barenblatt(y, 1.0, 2.0, 1, 1.0), 2.0); };
            double lap = (um(x + dx) - 2.0 * um(x) + um(x - dx)) / (dx * dx);
            res = std::max(res, std::abs(ut - lap));
        }
        if (prev > 0.0) worst_ratio = prev / res;
        prev = res;
    }
    CHECK(worst_ratio == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("pressure is parabolic with laplacian -beta/t") {
    for (double t : {1.0, 4.0}) {
        double edge = pme_support_edge(t, 2.0, 1, 1.0);
        double dx = 1e-3;
        for (double x = -0.7 * edge; x <= 0.7 * edge; x += 0.2 * edge) {
            double lap = (pme_pressure(x + dx, t, 2.0, 1, 1.0) - 2.0 * pme_pressure(x, t, 2.0, 1, 1.0) +
                          pme_pressure(x - dx, t, 2.0, 1, 1.0)) /
                         (dx * dx);
            CHECK(lap == doctest::Approx(-1.0 / (3.0 * t)).epsilon(1e-6));
        }
    }
}

TEST_CASE("source solution scaling invariance") {
    auto [alpha, beta] = pme_exponents(2.0, 1);
    for (double lam : {2.0, 10.0}) {
        for (double x : {0.0, 0.5, 1.3, 1.9}) {
            double lhs = pme_barenblatt(x, 1.0, 2.0, 1, 1.0);
            double rhs = std::pow(lam, alpha) *
                         pme_barenblatt(std::pow(lam, beta) * x, lam, 2.0, 1, 1.0);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("fast-diffusion solution: mass and fat tail") {
    double m = 0.5;
    double msum = 0.0;
    double dx = 1e-2;
    for (double x = -400.0; x <= 400.0; x += dx) msum += fde_barenblatt(x, 1.0, m, 1, 1.0) * dx;
    // tail remainder: u ~ c x^{-4}, so int_{400}^inf = u(400)*400/3
    msum += 2.0 * fde_barenblatt(400.0, 1.0, m, 1, 1.0) * 400.0 / 3.0;
    CHECK(msum == doctest::Approx(1.0).epsilon(1e-5));

    const int npts = 20;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < npts; ++i) {
        double x = 100.0 * std::pow(10.0, i / (npts - 1.0));
        double lx = std::log(x), ly = std::log(fde_barenblatt(x, 1.0, m, 1, 1.0));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-2.0 / (1.0 - m)).epsilon(0.02));
}

TEST_CASE("fast diffusion near m=0 approaches the Cauchy shape") {
    // m=0 itself degenerates (k = (1-m)beta/2m); approach it as a limit
    CHECK_THROWS(fde_barenblatt(0.0, 1.0, 0.0, 1, 1.0));
    double m = 1e-4;
    double u0 = fde_barenblatt(0.0, 1.0, m, 1, 1.0);
    double half = 0.0;
    for (double x = 0.0; x < 100.0; x += 1e-4) {
        if (fde_barenblatt(x, 1.0, m, 1, 1.0) < 0.5 * u0) {
            half = x;
            break;
        }
    }
    CHECK(half > 0.0);
    for (double x : {0.3, 1.0, 2.7, 9.0}) {
        double shape = fde_barenblatt(x, 1.0, m, 1, 1.0) / u0;
        CHECK(shape == doctest::Approx(1.0 / (1.0 + sq(x / half))).epsilon(1e-2));
    }
}

TEST_CASE("shrinking-ball solution: mass rate, residual order, extinction") {
    double a = 1.3, T = 2.0;
    for (double t : {0.0, 1.0, 1.9}) {
        double msum = 0.0;
        double dr = 1e-3;
        for (double r = 0.5 * dr; r < 2000.0; r += dr)
            msum += logdiff_extinction(r, t, a, T) * 2.0 * std::numbers::pi * r * dr;
        CHECK(msum == doctest::Approx(8.0 * std::numbers::pi * (T - t)).epsilon(1e-5));
    }
    // radial residual of u_t - Delta log u at t=1
    double prev = 0.0, ratio = 0.0;
    for (double dr : {2e-3, 1e-3}) {
        double res = 0.0;
        const double dt = 1e-7;
        for (double r = 0.5; r <= 3.0; r += dr) {
            double ut = (logdiff_extinction(r, 1.0 + dt, a, T) -
                         logdiff_extinction(r, 1.0 - dt, a, T)) /
                        (2.0 * dt);
            auto lg = [&](double rr) { return std::log(logdiff_extinction(rr, 1.0, a, T)); };
            double lap = (lg(r + dr) - 2.0 * lg(r) + lg(r - dr)) / (dr * dr) +
                         (lg(r + dr) - lg(r - dr)) / (2.0 * dr * r);
            res = std::max(res, std::abs(ut - lap));
        }
        if (prev > 0.0) ratio = prev / res;
        prev = res;
    }
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.2));
    CHECK(logdiff_extinction(0.7, T - 1e-12, a, T) < 1e-11);
    CHECK_THROWS(logdiff_extinction(0.0, T, a, T));
}

TEST_CASE("fractional-pressure profile: exponents, mass, stationarity") {
    // s=1/2 means alpha = beta = 1/2: sup decay matches
    CHECK(pmfp_profile(0.0, 4.0, 0.5) ==
          doctest::Approx(pmfp_profile(0.0, 1.0, 0.5) / 2.0).epsilon(1e-12));
    for (double s : {0.25, 0.5, 0.75}) {
        auto [A, B] = pmfp_constants(s);
        CHECK(A > 0.0);
        CHECK(B > 0.0);
        double R = std::sqrt(A / B);
        double msum = 0.0, dx = R / 40000.0;
        for (double x = 0.5 * dx; x < R; x += dx)
            msum += 2.0 * pmfp_profile(x, 1.0, s) * dx;
        CHECK(msum == doctest::Approx(1.0).epsilon(1e-5));
        // rescaled transport velocity dp/dy + beta y vanishes inside the support
        double beta = 1.0 / (3.0 - 2.0 * s);
        Grid1D g(-4.0 * R, 8.0 * R, 4096, Geometry::Periodic);
        Field F = sample(g, [&](double y) { return pmfp_profile(y, 1.0, s); });
        Field p = inverse_riesz(F, s, true);
        double worst = 0.0;
        for (int j = 0; j < g.n; ++j) {
            double y = g.x(j);
            if (std::abs(y) > 0.6 * R) continue;
            double dp = (p[j + 1] - p[j - 1]) / (2.0 * g.dx());
            worst = std::max(worst, std::abs(dp + beta * y));
        }
        CHECK(worst < 5e-3 * beta * R);
    }
}

TEST_CASE("traveling front at and above the minimal speed") {
    for (double c : {2.0, 3.0}) {
        KppWave w = kpp_wave(c, logistic, logistic_prime);
        CHECK(w.monotone);
        for (size_t i = 1; i < w.phi.size(); ++i) {
            CHECK(w.phi[i] >= w.phi[i - 1] - 1e-12);
            CHECK(w.phi[i] >= 0.0);
            CHECK(w.phi[i] <= 1.0);
        }
        CHECK(std::abs(w.phi.back() - 1.0) < 1e-6);
        CHECK(w.residual < 1e-8);
    }
}

TEST_CASE("no monotone front below the minimal speed") {
    KppWave w = kpp_wave(1.5, logistic, logistic_prime);
    CHECK_FALSE(w.monotone);
}
