#include "fraclab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fraclab/nonlocal.hpp"

namespace fraclab {

void DiagnosticSeries::add(double time, double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("DiagnosticSeries: non-finite value");
    if (!samples.empty() && time <= samples.back().first)
        throw std::invalid_argument("DiagnosticSeries: times must be strictly increasing");
    samples.emplace_back(time, value);
}

std::optional<double> support_edge(const Field& f, double eps) {
    double sup = 0.0;
    for (double v : f.values) {
        if (v < 0.0) throw std::invalid_argument("support_edge: field must be nonnegative");
        sup = std::max(sup, v);
    }
    double thresh = eps * sup;
    int last = -1;
    for (int i = 0; i < f.size(); ++i)
        if (f[i] > thresh) last = i;
    if (last < 0) return std::nullopt;
    if (last + 1 >= f.size()) return f.grid.x(last);
    // linear crossing of the threshold between the last positive cell
    // and its neighbor
    double frac = (f[last] - thresh) / (f[last] - f[last + 1]);
    return f.grid.x(last) + frac * f.grid.dx();
}

std::pair<double, double> fit_power_law(const DiagnosticSeries& series, double t0, double t1) {
    std::vector<double> lx, ly;
    for (auto [t, v] : series.samples) {
        if (t < t0 || t > t1) continue;
        if (!(v > 0.0)) throw std::invalid_argument("fit_power_law: non-positive value in window");
        lx.push_back(std::log(t));
        ly.push_back(std::log(v));
    }
    const int n = static_cast<int>(lx.size());
    if (n < 10) throw std::invalid_argument("fit_power_law: need at least 10 samples in window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
        syy += ly[i] * ly[i];
    }
    double denom = n * sxx - sx * sx;
    double slope = (n * sxy - sx * sy) / denom;
    double ss_tot = syy - sy * sy / n;
    double intercept = (sy - slope * sx) / n;
    double ss_res = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = ly[i] - (intercept + slope * lx[i]);
        ss_res += r * r;
    }
    double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return {slope, r2};
}

double clt_error(const Field& u, const Field& attractor, double renorm_exp) {
    if (!(u.grid == attractor.grid)) throw std::invalid_argument("clt_error: grids differ");
    double m1 = mass(u), m2 = mass(attractor);
    if (std::abs(m1 - m2) > 1e-6 * std::max(1.0, std::abs(m2)))
        throw std::invalid_argument("clt_error: masses differ beyond 1e-6");
    double worst = 0.0;
    for (int i = 0; i < u.size(); ++i) worst = std::max(worst, std::abs(u[i] - attractor[i]));
    return std::pow(u.time, renorm_exp) * worst;
}

std::pair<double, double> ghp_ratio(const Field& u, double t, const GhpContext& ctx) {
    if (!(u.grid == ctx.phi1.grid)) throw std::invalid_argument("ghp_ratio: grids differ");
    double pmax = 0.0;
    for (double v : ctx.phi1.values) pmax = std::max(pmax, v);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    double scale = std::pow(t, 1.0 / (ctx.m - 1.0));
    for (int i = 0; i < u.size(); ++i) {
        if (ctx.phi1[i] <= 0.05 * pmax) continue;
        double r = u[i] * scale / std::pow(ctx.phi1[i], ctx.sigma / ctx.m);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

double sigma_exponent(double s, double m, double gamma) {
    if (!(m > 1.0)) throw std::invalid_argument("sigma_exponent: m must exceed 1");
    return std::min(1.0, 2.0 * s * m / (gamma * (m - 1.0)));
}

double separable_relative_error(const Field& u, double t, const Field& S, double m) {
    if (!(u.grid == S.grid)) throw std::invalid_argument("separable_relative_error: grids differ");
    double smax = 0.0;
    for (double v : S.values) smax = std::max(smax, v);
    double scale = std::pow(t, 1.0 / (m - 1.0));
    double worst = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        if (S[i] <= 1e-8 * smax) continue;
        worst = std::max(worst, std::abs(u[i] * scale / S[i] - 1.0));
    }
    return worst;
}

std::optional<double> extinction_detector(const Trajectory& traj) {
    if (traj.snapshots.empty()) return std::nullopt;
    const double kInf = std::numeric_limits<double>::infinity();
    double sup0 = lp_norm(traj.snapshots.front(), kInf);
    for (const Field& f : traj.snapshots)
        if (lp_norm(f, kInf) < 1e-10 * sup0) return f.time;
    return std::nullopt;
}

std::pair<double, double> energy_monitor(const Field& u, double s) {
    if (u.grid.geometry != Geometry::Periodic)
        throw std::invalid_argument("energy_monitor: periodic grid required");
    const int n = u.grid.n;
    const double dx = u.grid.dx();
    double entropy = 0.0;
    for (double v : u.values)
        if (v > 1e-14) entropy += v * std::log(v) * dx;
    std::vector<double> w = pair_weights(u.grid, 1.0 - s);
    double b = 0.0;
    for (int i = 0; i < n; ++i)
        for (int d = 1; d < n; ++d) {
            double diff = u[i] - u[(i + d) % n];
            b += 0.5 * w[d] * diff * diff;
        }
    return {entropy, b * dx};
}

}  // namespace fraclab
