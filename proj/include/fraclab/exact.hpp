// Closed-form and semi-analytic reference solutions used as oracles.
#pragma once

#include <utility>

#include "fraclab/grid.hpp"

namespace fraclab {

enum class SimilarityFamily { PME, FDE, PMFP, FHE };

struct SelfSimilarSpec {
    double alpha = 0.0;  // decay exponent
    double beta = 0.0;   // spreading exponent
    SimilarityFamily family = SimilarityFamily::PME;
    double m = 2.0;
    double s = 0.5;
    int N = 1;
    double M = 1.0;
};

// Slow-diffusion exponents: alpha = N/(N(m-1)+2), beta = 1/(N(m-1)+2).
std::pair<double, double> pme_exponents(double m, int N);

// Good-range fast-diffusion exponents: alpha = N/(2-N(1-m)),
// beta = 1/(2-N(1-m)); requires (N-2)/N < m < 1.
std::pair<double, double> fde_exponents(double m, int N);

// Source-type solution t^{-alpha}(C - k (x t^{-beta})^2)_+^{1/(m-1)}
// with k = (m-1) beta / (2m) and C calibrated so the mass is M.
double pme_barenblatt(double x, double t, double m, int N, double M);

// Support edge location (C/k)^{1/2} t^beta of the same solution.
double pme_support_edge(double t, double m, int N, double M);

// Parabolic pressure profile v = (m/(m-1)) u^{m-1} of the source
// solution (zero outside the support).
double pme_pressure(double x, double t, double m, int N, double M);

// Fat-tailed source solution t^{-alpha}(C + k (x t^{-beta})^2)^{-1/(1-m)}
// for m in the good fast-diffusion range.
double fde_barenblatt(double x, double t, double m, int N, double M);

// Shrinking 2D radial solution of u_t = Delta log u, vanishing at time
// T with mass 8 pi (T - t): u = 8 a^2 (T-t) / (a^2 + r^2)^2.
double logdiff_extinction(double r, double t, double a, double T);

// Self-similar profile of the porous-medium equation with fractional
// pressure: t^{-alpha}(A - B (x t^{-beta})^2)_+^{1-s} in N=1, with
// beta = 1/(3-2s), alpha = beta, unit mass; B fixed by vanishing of the
// rescaled transport velocity dp/dx - beta*y inside the support.
double pmfp_profile(double x, double t, double s);

// Profile constants (A, B) for the unit-mass N=1 family at order s.
std::pair<double, double> pmfp_constants(double s);

struct KppWave {
    double c = 2.0;
    bool monotone = false;   // false when c < 2 sqrt(f'(0)) (no connection)
    std::vector<double> xi;  // uniform on [-40, 40]
    std::vector<double> phi;
    double residual = 0.0;   // max |{-phi'' + c phi' - f(phi)}|
};

// Monotone traveling front -phi'' + c phi' = f(phi), phi(-inf)=0,
// phi(+inf)=1, traced backward from the saddle at 1 along its approach
// eigendirection.
KppWave kpp_wave(double c, const std::function<double(double)>& f,
                 const std::function<double(double)>& fprime);

}  // namespace fraclab
