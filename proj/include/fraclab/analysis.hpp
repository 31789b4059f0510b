// Diagnostics: free-boundary tracking, rate fitting, Harnack-type
// ratios, entropy and energy monitors, extinction detection.
#pragma once

#include <optional>
#include <string>
#include <utility>

#include "fraclab/grid.hpp"
#include "fraclab/solvers.hpp"

namespace fraclab {

struct DiagnosticSeries {
    std::string name;
    std::vector<std::pair<double, double>> samples;  // (time, value)

    // Appends one sample; times must be strictly increasing and values
    // finite.
    void add(double time, double value);
};

// Largest x with f(x) > eps * sup f, linearly interpolated against the
// next cell; empty when the whole field sits at or below the threshold.
std::optional<double> support_edge(const Field& f, double eps = 1e-8);

// Least-squares slope of log(value) against log(time) over the samples
// with t0 <= time <= t1; returns (exponent, r_squared). Needs at least
// 10 samples with positive values in the window.
std::pair<double, double> fit_power_law(const DiagnosticSeries& series, double t0, double t1);

// Renormalized attractor distance t^renorm_exp * sup |u - attractor|;
// the two fields must share the grid and agree in mass to 1e-6.
double clt_error(const Field& u, const Field& attractor, double renorm_exp);

struct GhpContext {
    Field phi1;           // first eigenfunction, positive in the interior
    double sigma = 1.0;   // boundary exponent
    double m = 2.0;       // nonlinearity exponent
    double t_star = 1.0;  // characteristic time
};

// Extrema of u(x,t) t^{1/(m-1)} / phi1(x)^{sigma/m} over the interior
// cells with phi1 > 0.05 * max(phi1).
std::pair<double, double> ghp_ratio(const Field& u, double t, const GhpContext& ctx);

// min(1, 2 s m / (gamma (m-1))); requires m > 1.
double sigma_exponent(double s, double m, double gamma);

// max over the interior of |u(x) t^{1/(m-1)} / S(x) - 1|, taken where
// S > 1e-8 * sup S.
double separable_relative_error(const Field& u, double t, const Field& S, double m);

// First snapshot time with sup |u| < 1e-10 * sup |u0|, if any.
std::optional<double> extinction_detector(const Trajectory& traj);

// Entropy int u log u (cells below 1e-14 contribute zero) and the
// dissipation bilinear form of order 1-s evaluated with the pairwise
// quadrature weights. Periodic grids only.
std::pair<double, double> energy_monitor(const Field& u, double s);

}  // namespace fraclab
