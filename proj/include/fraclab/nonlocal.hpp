// Diffusion operators: classical Laplacian, free-space fractional
// Laplacian in three representations, inverse Riesz potential, and the
// bounded-domain fractional Laplacians (RFL, SFL, CFL).
#pragma once

#include <Eigen/Dense>
#include <optional>

#include "fraclab/grid.hpp"

namespace fraclab {

enum class OperatorKind {
    ClassicalLaplacian,
    FracSpectral,
    FracQuadrature,
    FracSemigroup,
    InverseRiesz,
    RFL,
    SFL,
    CFL,
};

struct OperatorSpec {
    OperatorKind kind = OperatorKind::ClassicalLaplacian;
    double s = 0.5;

    OperatorSpec() = default;
    OperatorSpec(OperatorKind k, double order);
    bool operator==(const OperatorSpec&) const = default;

    // Green-function boundary exponent: s for RFL, 1 for SFL, s-1/2 for CFL.
    double gamma() const;
};

// Normalization constant fixed by requiring the discrete quadrature
// operator to reproduce the symbol |xi|^{2s} on a plane wave of the
// periodic calibration box. Cached per s.
double quadrature_normalization(double s);

// (-Delta)^s via the Fourier symbol |xi_k|^{2s}; periodic power-of-two
// grids only. Accepts s in (0,1]; s=1 gives -Delta.
Field apply_spectral(const Field& f, double s);

// (-Delta)^s via the hypersingular integral with cell-pair integrated
// kernel weights. Periodic or TruncatedLine (zero-exterior tail handled
// analytically). Appends a warning string when the decay budget at the
// truncation edges is violated.
Field apply_quadrature(const Field& f, double s, std::vector<std::string>* warnings = nullptr);

// Normalized pairwise weights c_s W_d per node offset d (index 0 unused)
// as used by apply_quadrature: periodic grids fold box images, interval
// grids return the raw line weights.
std::vector<double> pair_weights(const Grid1D& g, double s);

struct SemigroupQuad {
    int laguerre_nodes = 64;
    double tolerance = 1e-8;  // on the scalar mode integral
};

// (-Delta)^s via the heat-semigroup formula, evaluated mode-by-mode with
// a split time quadrature (series near 0, Gauss-Laguerre on the tail).
Field apply_semigroup(const Field& f, double s, const SemigroupQuad& quad = {});

// Scalar map lambda -> lambda^s computed through the semigroup time
// integral (exposed for oracle tests).
double semigroup_power(double lambda, double s, const SemigroupQuad& quad = {});

// (-Delta)^{-s} on a periodic zero-mean field; zero mode stays zero.
// When subtract_mean is false the input must already have zero mean.
Field inverse_riesz(const Field& f, double s, bool subtract_mean = false);

struct DenseOperator {
    Grid1D grid;
    Eigen::MatrixXd mat;

    Field apply(const Field& f) const;
};

// Restricted fractional Laplacian on a zero-exterior interval: dense
// symmetric matrix from the full-line quadrature, exterior contribution
// integrated analytically per row.
DenseOperator rfl_matrix(const Grid1D& g, double s);

// Censored (regional) fractional Laplacian; requires s > 1/2.
DenseOperator cfl_matrix(const Grid1D& g, double s);

// Spectral fractional Laplacian on an interval through the Dirichlet
// sine eigenbasis, truncated at `modes`.
Field sfl_apply(const Field& f, double s, int modes);

// Dirichlet sine eigenpair of the interval: lambda_j = (j pi / L)^2,
// phi_j = sqrt(2/L) sin(j pi (x-left)/L), j >= 1.
double sfl_eigenvalue(const Grid1D& g, int j);
Field sfl_eigenfunction(const Grid1D& g, int j);

// SFL as a dense matrix (for implicit solvers), truncated at `modes`
// (defaults to all n modes).
DenseOperator sfl_matrix(const Grid1D& g, double s, int modes = -1);

struct SpectralDecomposition {
    std::vector<double> eigenvalues;   // ascending
    std::vector<Field> eigenfunctions; // dx-orthonormal
};

SpectralDecomposition eigs(const DenseOperator& op, int k);
SpectralDecomposition sfl_eigs(const Grid1D& g, double s, int k);

}  // namespace fraclab
