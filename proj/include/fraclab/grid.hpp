// 1D uniform grids and sampled scalar fields.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraclab {

enum class Geometry { Periodic, DirichletExterior, TruncatedLine };

// Uniform mesh on [left, left+length). Periodic grids place nodes at
// left + j*dx; the other geometries use cell centers left + (j+1/2)*dx,
// so a plain dx-weighted sum is the midpoint rule and discrete sine
// modes are exactly orthogonal.
struct Grid1D {
    double left = 0.0;
    double length = 1.0;
    int n = 0;
    Geometry geometry = Geometry::Periodic;

    Grid1D() = default;
    Grid1D(double left_, double length_, int n_, Geometry geom);

    double dx() const { return length / n; }
    double x(int j) const {
        return geometry == Geometry::Periodic ? left + j * dx()
                                              : left + (j + 0.5) * dx();
    }
    bool operator==(const Grid1D&) const = default;
};

bool is_power_of_two(int n);

struct Field {
    Grid1D grid;
    std::vector<double> values;
    double time = 0.0;

    Field() = default;
    Field(const Grid1D& g, double t = 0.0) : grid(g), values(g.n, 0.0), time(t) {}

    double& operator[](int j) { return values[j]; }
    double operator[](int j) const { return values[j]; }
    int size() const { return grid.n; }
};

// dx-weighted integral over the box.
double mass(const Field& f);

// Discrete L^p norm with dx weight; p = infinity() returns max |values|.
double lp_norm(const Field& f, double p);

// Sample a pointwise function onto the grid; rejects non-finite values.
Field sample(const Grid1D& g, const std::function<double(double)>& fn, double t = 0.0);

// dx-weighted inner product.
double inner(const Field& a, const Field& b);

// Clip values in (-tol_neg, 0) to zero; throw if any value is below
// -tol_neg with tol_neg = 1e-12 * max|u|. Returns the clipped mass.
double enforce_nonnegative(Field& f);

// True when |u| at the box edge stays below 1e-6 * max|u| (decay budget
// for whole-space formulas evaluated on a finite box).
bool decay_budget_ok(const Field& f);

}  // namespace fraclab
