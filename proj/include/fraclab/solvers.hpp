// Time-stepping engines: implicit filtration stepper, fractional
// porous-medium stepper, conservative pressure-model stepper, and the
// reaction-diffusion splitting.
#pragma once

#include <Eigen/Dense>

#include "fraclab/grid.hpp"
#include "fraclab/nonlocal.hpp"

namespace fraclab {

enum class NonlinearityKind { Power, Log1p, StefanGraph, Identity };

// Monotone constitutive map Phi with Phi(0) = 0 and its generalized
// inverse beta; StefanGraph uses a piecewise-linear regularization of
// width eps across the flat part of the graph.
struct Nonlinearity {
    NonlinearityKind kind = NonlinearityKind::Identity;
    double m = 2.0;       // Power exponent
    double latent = 1.0;  // StefanGraph latent heat
    double eps = 1e-6;    // StefanGraph regularization width

    static Nonlinearity power(double m);
    static Nonlinearity log_shifted();
    static Nonlinearity stefan(double latent);
    static Nonlinearity identity();

    double phi(double u) const;
    double beta(double v) const;
    double beta_prime(double v) const;

    bool operator==(const Nonlinearity&) const = default;
};

struct StepControl {
    double h = 1e-3;
    double newton_tol = 1e-10;
    int newton_max = 50;
    double cfl_safety = 0.5;

    bool operator==(const StepControl&) const = default;
};

// Dense matrix of the chosen operator on the grid; classical Laplacian
// uses the three-point stencil with geometry-matched boundary closure
// (periodic wrap, reflecting for TruncatedLine, wall value zero for
// DirichletExterior).
Eigen::MatrixXd dense_operator_matrix(const Grid1D& g, const OperatorSpec& op);

// One backward Euler step of u_t + A Phi(u) = 0: solves
// h A v + beta(v) = u_prev for v = Phi(u) by damped Newton and returns
// u = beta(v). The classical Laplacian path stays tridiagonal; other
// operators use a dense Jacobian. A failed Newton solve is retried with
// progressively halved substeps before aborting.
Field itd_step(const Field& u_prev, double h, const Nonlinearity& phi,
               const OperatorSpec& op = {}, const StepControl& control = {});

// Same step against a prebuilt dense operator matrix (avoids rebuilding
// it inside long runs).
Field itd_step_dense(const Field& u_prev, double h, const Nonlinearity& phi,
                     const Eigen::MatrixXd& a, const StepControl& control);

// Backward Euler step of u_t + L u^m = 0 with a fractional operator.
Field fpme_step(const Field& u_prev, double h, double m, const OperatorSpec& op,
                const StepControl& control = {});

struct Trajectory {
    std::vector<Field> snapshots;  // at the requested output times
};

// Repeated itd_step with fixed h, landing exactly on each requested
// output time (monotone increasing, first one >= u0.time).
Trajectory run_filtration(const Field& u0, const Nonlinearity& phi, const OperatorSpec& op,
                          const StepControl& control, const std::vector<double>& output_times);

// Advance the pressure-model continuity equation u_t = d_x(u d_x p),
// p = (-Delta)^{-s}(u - mean), by control.h using conservative upwind
// fluxes; the internal substep is limited to cfl_safety * dx / max|V|.
// Periodic grids only.
Field pmfp_step(const Field& u_prev, const StepControl& control, double s);

enum class ReactionKind { None, Logistic };

// Strang splitting: exact half-step of the reaction flow, one diffusion
// step (spectral convolution on periodic grids, backward Euler
// otherwise), exact half-step of the reaction flow. Logistic values must
// stay inside [0,1] up to 1e-8.
Field rd_step(const Field& u_prev, double h, const OperatorSpec& diffusion, ReactionKind f);

struct BurgersReport {
    std::vector<double> s_values;
    std::vector<double> deviations;  // sup |v_num - v_characteristics| at t_end
    bool decreasing = false;
};

// Integrate zero-mean data to v, run the pressure model at s close to 1,
// and compare v against the method-of-characteristics solution of
// v_t + v v_x = 0; only valid before shock formation.
BurgersReport burgers_check(const Field& u0, double t_end, const StepControl& control);

}  // namespace fraclab
