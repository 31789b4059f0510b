#include "fraclab/grid.hpp"

#include <algorithm>
#include <limits>

namespace fraclab {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Grid1D::Grid1D(double left_, double length_, int n_, Geometry geom)
    : left(left_), length(length_), n(n_), geometry(geom) {
    if (n < 8) throw std::invalid_argument("Grid1D: n must be >= 8");
    if (!(length > 0.0)) throw std::invalid_argument("Grid1D: length must be positive");
    if (geometry == Geometry::Periodic && !is_power_of_two(n))
        throw std::invalid_argument("Grid1D: periodic grids require power-of-two n");
}

double mass(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * f.grid.dx();
}

double lp_norm(const Field& f, double p) {
    if (p == std::numeric_limits<double>::infinity()) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1 or infinity");
    double s = 0.0;
    for (double v : f.values) s += std::pow(std::abs(v), p);
    return std::pow(s * f.grid.dx(), 1.0 / p);
}

Field sample(const Grid1D& g, const std::function<double(double)>& fn, double t) {
    Field f(g, t);
    for (int j = 0; j < g.n; ++j) {
        double v = fn(g.x(j));
        if (!std::isfinite(v)) throw std::domain_error("sample: non-finite value at x=" + std::to_string(g.x(j)));
        f[j] = v;
    }
    return f;
}

double inner(const Field& a, const Field& b) {
    double s = 0.0;
    for (int j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s * a.grid.dx();
}

double enforce_nonnegative(Field& f) {
    double sup = lp_norm(f, std::numeric_limits<double>::infinity());
    double tol = 1e-12 * sup;
    double clipped = 0.0;
    for (double& v : f.values) {
        if (v < -tol) throw std::runtime_error("negative density below tolerance");
        if (v < 0.0) {
            clipped -= v;
            v = 0.0;
        }
    }
    return clipped * f.grid.dx();
}

bool decay_budget_ok(const Field& f) {
    double sup = lp_norm(f, std::numeric_limits<double>::infinity());
    if (sup == 0.0) return true;
    double edge = std::max(std::abs(f.values.front()), std::abs(f.values.back()));
    return edge <= 1e-6 * sup;
}

}  // namespace fraclab
