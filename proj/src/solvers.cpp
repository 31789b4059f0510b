#include "fraclab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fraclab/fft.hpp"
#include "fraclab/kernels.hpp"

namespace fraclab {

Nonlinearity Nonlinearity::power(double m) {
    if (!(m > 0.0)) throw std::invalid_argument("Nonlinearity::power: m must be positive");
    Nonlinearity p;
    p.kind = NonlinearityKind::Power;
    p.m = m;
    return p;
}

Nonlinearity Nonlinearity::log_shifted() {
    Nonlinearity p;
    p.kind = NonlinearityKind::Log1p;
    return p;
}

Nonlinearity Nonlinearity::stefan(double latent) {
    if (!(latent > 0.0)) throw std::invalid_argument("Nonlinearity::stefan: latent heat must be positive");
    Nonlinearity p;
    p.kind = NonlinearityKind::StefanGraph;
    p.latent = latent;
    return p;
}

Nonlinearity Nonlinearity::identity() { return {}; }

double Nonlinearity::phi(double u) const {
    switch (kind) {
        case NonlinearityKind::Power:
            return u < 0.0 ? -std::pow(-u, m) : std::pow(u, m);
        case NonlinearityKind::Log1p:
            return std::log1p(u);
        case NonlinearityKind::StefanGraph:
            if (u < 0.0) return u;
            return u <= latent ? 0.0 : u - latent;
        case NonlinearityKind::Identity:
            return u;
    }
    return u;
}

double Nonlinearity::beta(double v) const {
    switch (kind) {
        case NonlinearityKind::Power:
            return v < 0.0 ? -std::pow(-v, 1.0 / m) : std::pow(v, 1.0 / m);
        case NonlinearityKind::Log1p:
            return std::expm1(v);
        case NonlinearityKind::StefanGraph:
            if (v < 0.0) return v;
            return v <= eps ? v * (1.0 + latent / eps) : v + latent;
        case NonlinearityKind::Identity:
            return v;
    }
    return v;
}

double Nonlinearity::beta_prime(double v) const {
    switch (kind) {
        case NonlinearityKind::Power: {
            // keep the Jacobian finite through the degenerate point
            double floor_u = 1e-12;
            double av = std::max(std::abs(v), std::pow(floor_u, m));
            return std::max((1.0 / m) * std::pow(av, 1.0 / m - 1.0), 1e-12);
        }
        case NonlinearityKind::Log1p:
            return std::exp(v);
        case NonlinearityKind::StefanGraph:
            if (v < 0.0) return 1.0;
            return v <= eps ? 1.0 + latent / eps : 1.0;
        case NonlinearityKind::Identity:
            return 1.0;
    }
    return 1.0;
}

namespace {

// Minus the discrete Laplacian with the boundary closure of the grid
// geometry: periodic wrap, reflecting ends on TruncatedLine, wall value
// zero (ghost = -v_0) on DirichletExterior.
std::vector<double> neg_laplacian(const Grid1D& g, const std::vector<double>& v) {
    const int n = g.n;
    const double inv = 1.0 / (g.dx() * g.dx());
    std::vector<double> out(n);
    for (int i = 1; i + 1 < n; ++i) out[i] = (2.0 * v[i] - v[i - 1] - v[i + 1]) * inv;
    switch (g.geometry) {
        case Geometry::Periodic:
            out[0] = (2.0 * v[0] - v[n - 1] - v[1]) * inv;
            out[n - 1] = (2.0 * v[n - 1] - v[n - 2] - v[0]) * inv;
            break;
        case Geometry::TruncatedLine:
            out[0] = (v[0] - v[1]) * inv;
            out[n - 1] = (v[n - 1] - v[n - 2]) * inv;
            break;
        case Geometry::DirichletExterior:
            out[0] = (3.0 * v[0] - v[1]) * inv;
            out[n - 1] = (3.0 * v[n - 1] - v[n - 2]) * inv;
            break;
    }
    return out;
}

// Thomas solve of a symmetric tridiagonal system with constant
// off-diagonal e, in place on rhs.
void tridiag_solve(std::vector<double> diag, double e, std::vector<double>& rhs) {
    const int n = static_cast<int>(diag.size());
    for (int i = 1; i < n; ++i) {
        double w = e / diag[i - 1];
        diag[i] -= w * e;
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - e * rhs[i + 1]) / diag[i];
}

// Cyclic variant via the rank-one corner correction.
void cyclic_tridiag_solve(const std::vector<double>& diag, double e, std::vector<double>& rhs) {
    const int n = static_cast<int>(diag.size());
    double gammac = -diag[0];
    std::vector<double> b = diag;
    b[0] -= gammac;
    b[n - 1] -= e * e / gammac;
    std::vector<double> u(n, 0.0);
    u[0] = gammac;
    u[n - 1] = e;
    std::vector<double> y = rhs, z = u;
    tridiag_solve(b, e, y);
    tridiag_solve(b, e, z);
    double vy = y[0] + (e / gammac) * y[n - 1];
    double vz = z[0] + (e / gammac) * z[n - 1];
    double factor = vy / (1.0 + vz);
    for (int i = 0; i < n; ++i) rhs[i] = y[i] - factor * z[i];
}

struct NewtonFail : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Damped Newton on F(v) = h A v + beta(v) - u_prev; apply_a evaluates
// A v and solve_jac solves (h A + diag(bp)) d = r.
template <class ApplyA, class SolveJac>
std::vector<double> newton_solve(const std::vector<double>& u_prev, double h,
                                 const Nonlinearity& phi, const StepControl& control,
                                 const ApplyA& apply_a, const SolveJac& solve_jac) {
    const int n = static_cast<int>(u_prev.size());
    double scale = 1.0;
    bool nonneg = true;
    for (double v : u_prev) {
        scale = std::max(scale, std::abs(v));
        if (v < 0.0) nonneg = false;
    }
    const double tol = control.newton_tol * scale;
    // projected iteration: with nonnegative data the solution has v >= 0,
    // and clamping prevents overshoot into the non-smooth branch of beta
    const bool project = nonneg && phi.kind == NonlinearityKind::Power;

    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = phi.phi(u_prev[i]);

    auto residual = [&](const std::vector<double>& vv, std::vector<double>& f) {
        f = apply_a(vv);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            f[i] = h * f[i] + phi.beta(vv[i]) - u_prev[i];
            worst = std::max(worst, std::abs(f[i]));
        }
        return worst;
    };

    std::vector<double> f, ftry, vtry(n), d(n), bp(n);
    double res = residual(v, f);
    bool converged = false;
    for (int it = 0; it < control.newton_max; ++it) {
        // one polish iteration past the tolerance so the leftover
        // residual (the per-step mass drift) is quadratically smaller
        if (res < tol) {
            if (converged || res < 1e-4 * tol) return v;
            converged = true;
        }
        for (int i = 0; i < n; ++i) bp[i] = phi.beta_prime(v[i]);
        for (int i = 0; i < n; ++i) d[i] = -f[i];
        solve_jac(bp, d);
        double lam = 1.0;
        bool accepted = false;
        while (lam > 1e-6) {
            for (int i = 0; i < n; ++i) {
                vtry[i] = v[i] + lam * d[i];
                if (project && vtry[i] < 0.0) vtry[i] = 0.0;
            }
            double rtry = residual(vtry, ftry);
            if (rtry < res || rtry < tol) {
                v.swap(vtry);
                f.swap(ftry);
                res = rtry;
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if (!accepted) break;
    }
    if (res < tol || converged) return v;
    throw NewtonFail("implicit step: Newton stalled at residual " + std::to_string(res));
}

Field finish_step(const Field& u_prev, double h, const Nonlinearity& phi,
                  const StepControl& control, const std::vector<double>& v) {
    Field out(u_prev.grid, u_prev.time + h);
    for (int i = 0; i < u_prev.size(); ++i) out[i] = phi.beta(v[i]);
    if (phi.kind == NonlinearityKind::Power) {
        double scale = 1.0;
        for (double w : u_prev.values) scale = std::max(scale, std::abs(w));
        double tol_neg = 1e3 * control.newton_tol * scale;
        for (double& w : out.values) {
            if (w < -tol_neg) throw std::runtime_error("implicit step: negative state beyond tolerance");
            if (w < 0.0) w = 0.0;
        }
    }
    return out;
}

Field itd_step_tridiag(const Field& u_prev, double h, const Nonlinearity& phi,
                       const StepControl& control) {
    const Grid1D& g = u_prev.grid;
    const double inv = 1.0 / (g.dx() * g.dx());
    const double e = -h * inv;
    auto apply_a = [&](const std::vector<double>& v) { return neg_laplacian(g, v); };
    auto solve_jac = [&](const std::vector<double>& bp, std::vector<double>& rhs) {
        std::vector<double> diag(g.n);
        double base = 2.0 * h * inv;
        for (int i = 0; i < g.n; ++i) diag[i] = base + bp[i];
        if (g.geometry == Geometry::TruncatedLine) {
            diag[0] -= h * inv;
            diag[g.n - 1] -= h * inv;
        } else if (g.geometry == Geometry::DirichletExterior) {
            diag[0] += h * inv;
            diag[g.n - 1] += h * inv;
        }
        if (g.geometry == Geometry::Periodic)
            cyclic_tridiag_solve(diag, e, rhs);
        else
            tridiag_solve(std::move(diag), e, rhs);
    };
    std::vector<double> v = newton_solve(u_prev.values, h, phi, control, apply_a, solve_jac);
    return finish_step(u_prev, h, phi, control, v);
}

// Forward slope of the constitutive map, floored away from the
// degenerate point so the Jacobian stays invertible.
double phi_prime(const Nonlinearity& phi, double u) {
    switch (phi.kind) {
        case NonlinearityKind::Power: {
            double au = std::max(std::abs(u), 1e-12);
            return std::max(phi.m * std::pow(au, phi.m - 1.0), 1e-12);
        }
        case NonlinearityKind::Log1p:
            return 1.0 / (1.0 + std::max(u, -1.0 + 1e-12));
        case NonlinearityKind::StefanGraph:
            if (u < 0.0 || u > phi.latent) return 1.0;
            return phi.eps / (phi.eps + phi.latent);
        case NonlinearityKind::Identity:
            return 1.0;
    }
    return 1.0;
}

// Dense-operator step solved in the u variable: F(u) = u + h A phi(u)
// - u_prev. Near vacuum the Jacobian approaches the identity, which the
// v-form Newton (with its singular beta') cannot manage.
Field itd_step_dense_once(const Field& u_prev, double h, const Nonlinearity& phi,
                          const Eigen::MatrixXd& a, const StepControl& control) {
    const int n = u_prev.size();
    double scale = 1.0;
    bool nonneg = true;
    for (double w : u_prev.values) {
        scale = std::max(scale, std::abs(w));
        if (w < 0.0) nonneg = false;
    }
    const double tol = control.newton_tol * scale;
    const bool project = nonneg && phi.kind == NonlinearityKind::Power && phi.m > 1.0;

    Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(u_prev.values.data(), n);
    const Eigen::VectorXd up = u;
    auto residual = [&](const Eigen::VectorXd& uu, Eigen::VectorXd& f) {
        Eigen::VectorXd pv(n);
        for (int i = 0; i < n; ++i) pv[i] = phi.phi(uu[i]);
        f = uu + h * (a * pv) - up;
        return f.cwiseAbs().maxCoeff();
    };
    Eigen::VectorXd f(n), ftry(n), utry(n), d(n);
    double res = residual(u, f);
    bool converged = false;
    for (int it = 0; it < control.newton_max; ++it) {
        if (res < tol) {
            if (converged || res < 1e-4 * tol) break;
            converged = true;
        }
        Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(n, n);
        for (int j = 0; j < n; ++j) jac.col(j) += h * phi_prime(phi, u[j]) * a.col(j);
        d = jac.partialPivLu().solve(-f);
        double lam = 1.0;
        bool accepted = false;
        while (lam > 1e-6) {
            utry = u + lam * d;
            if (project) utry = utry.cwiseMax(0.0);
            double rtry = residual(utry, ftry);
            if (rtry < res || rtry < tol) {
                u.swap(utry);
                f.swap(ftry);
                res = rtry;
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if (!accepted) break;
    }
    if (!(res < tol || converged))
        throw NewtonFail("implicit step: Newton stalled at residual " + std::to_string(res));
    Field out(u_prev.grid, u_prev.time + h);
    for (int i = 0; i < n; ++i) out[i] = u[i];
    if (phi.kind == NonlinearityKind::Power && nonneg) {
        double tol_neg = 1e3 * control.newton_tol * scale;
        for (double& w : out.values) {
            if (w < -tol_neg) throw std::runtime_error("implicit step: negative state beyond tolerance");
            if (w < 0.0) w = 0.0;
        }
    }
    return out;
}

// Retry a failed implicit step as a ladder of shorter substeps; rough
// data can need several halvings before Newton becomes contractive.
template <class StepFn>
Field split_retry(const Field& u_prev, double h, const StepFn& step) {
    for (int split = 1; split <= 256; split *= 2) {
        try {
            Field u = u_prev;
            for (int k = 0; k < split; ++k) u = step(u, h / split);
            return u;
        } catch (const NewtonFail& e) {
            if (split == 256) throw std::runtime_error(e.what());
        }
    }
    throw std::logic_error("split_retry: unreachable");
}

}  // namespace

Eigen::MatrixXd dense_operator_matrix(const Grid1D& g, const OperatorSpec& op) {
    const int n = g.n;
    switch (op.kind) {
        case OperatorKind::ClassicalLaplacian: {
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
            double inv = 1.0 / (g.dx() * g.dx());
            for (int i = 0; i < n; ++i) a(i, i) = 2.0 * inv;
            for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = -inv;
            if (g.geometry == Geometry::Periodic) {
                a(0, n - 1) = a(n - 1, 0) = -inv;
            } else if (g.geometry == Geometry::TruncatedLine) {
                a(0, 0) = a(n - 1, n - 1) = inv;
            } else {
                a(0, 0) = a(n - 1, n - 1) = 3.0 * inv;
            }
            return a;
        }
        case OperatorKind::FracSpectral:
        case OperatorKind::FracSemigroup: {
            if (g.geometry != Geometry::Periodic)
                throw std::invalid_argument("dense_operator_matrix: spectral forms need a periodic grid");
            Field delta(g);
            delta[0] = 1.0;
            Field col = op.kind == OperatorKind::FracSpectral ? apply_spectral(delta, op.s)
                                                              : apply_semigroup(delta, op.s);
            Eigen::MatrixXd a(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) a(i, j) = col[(i - j + n) % n];
            return a;
        }
        case OperatorKind::FracQuadrature: {
            if (g.geometry == Geometry::Periodic) {
                std::vector<double> w = pair_weights(g, op.s);
                double diag = 0.0;
                for (int d = 1; d < n; ++d) diag += w[d];
                Eigen::MatrixXd a(n, n);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) a(i, j) = i == j ? diag : -w[(i - j + n) % n];
                return a;
            }
            Eigen::MatrixXd a(n, n);
            for (int j = 0; j < n; ++j) {
                Field basis(g);
                basis[j] = 1.0;
                Field col = apply_quadrature(basis, op.s);
                for (int i = 0; i < n; ++i) a(i, j) = col[i];
            }
            return a;
        }
        case OperatorKind::RFL:
            return rfl_matrix(g, op.s).mat;
        case OperatorKind::SFL:
            return sfl_matrix(g, op.s).mat;
        case OperatorKind::CFL:
            return cfl_matrix(g, op.s).mat;
        case OperatorKind::InverseRiesz:
            throw std::invalid_argument("dense_operator_matrix: inverse Riesz is not a diffusion generator");
    }
    throw std::invalid_argument("dense_operator_matrix: unknown operator");
}

Field itd_step(const Field& u_prev, double h, const Nonlinearity& phi, const OperatorSpec& op,
               const StepControl& control) {
    if (!(h > 0.0)) throw std::invalid_argument("itd_step: h must be positive");
    if (op.kind == OperatorKind::ClassicalLaplacian) {
        return split_retry(u_prev, h, [&](const Field& u, double hh) {
            return itd_step_tridiag(u, hh, phi, control);
        });
    }
    Eigen::MatrixXd a = dense_operator_matrix(u_prev.grid, op);
    return itd_step_dense(u_prev, h, phi, a, control);
}

Field itd_step_dense(const Field& u_prev, double h, const Nonlinearity& phi,
                     const Eigen::MatrixXd& a, const StepControl& control) {
    if (!(h > 0.0)) throw std::invalid_argument("itd_step_dense: h must be positive");
    return split_retry(u_prev, h, [&](const Field& u, double hh) {
        return itd_step_dense_once(u, hh, phi, a, control);
    });
}

Field fpme_step(const Field& u_prev, double h, double m, const OperatorSpec& op,
                const StepControl& control) {
    return itd_step(u_prev, h, Nonlinearity::power(m), op, control);
}

Trajectory run_filtration(const Field& u0, const Nonlinearity& phi, const OperatorSpec& op,
                          const StepControl& control, const std::vector<double>& output_times) {
    Trajectory traj;
    Field u = u0;
    bool tridiag = op.kind == OperatorKind::ClassicalLaplacian;
    Eigen::MatrixXd a;
    if (!tridiag) a = dense_operator_matrix(u0.grid, op);
    for (double target : output_times) {
        if (target < u.time - 1e-12)
            throw std::invalid_argument("run_filtration: output times must be increasing");
        while (u.time < target - 1e-12) {
            double step = std::min(control.h, target - u.time);
            u = tridiag ? itd_step(u, step, phi, op, control)
                        : itd_step_dense(u, step, phi, a, control);
        }
        u.time = target;
        traj.snapshots.push_back(u);
    }
    return traj;
}

Field pmfp_step(const Field& u_prev, const StepControl& control, double s) {
    const Grid1D& g = u_prev.grid;
    if (g.geometry != Geometry::Periodic)
        throw std::invalid_argument("pmfp_step: periodic grid required");
    const int n = g.n;
    const double dx = g.dx();
    Field u = u_prev;
    double remaining = control.h;
    std::vector<double> vel(n), flux(n);
    while (remaining > 0.0) {
        Field p = inverse_riesz(u, s, true);
        double vmax = 0.0;
        for (int j = 0; j < n; ++j) {
            vel[j] = -(p[(j + 1) % n] - p[j]) / dx;  // face between j and j+1
            vmax = std::max(vmax, std::abs(vel[j]));
        }
        double dt = vmax > 0.0 ? std::min(remaining, control.cfl_safety * dx / vmax) : remaining;
        for (int j = 0; j < n; ++j) {
            flux[j] = (vel[j] >= 0.0 ? u[j] : u[(j + 1) % n]) * vel[j];
            if (!std::isfinite(flux[j])) throw std::runtime_error("pmfp_step: non-finite flux");
        }
        for (int j = 0; j < n; ++j) u[j] -= dt / dx * (flux[j] - flux[(j - 1 + n) % n]);
        remaining -= dt;
    }
    u.time = u_prev.time + control.h;
    return u;
}

namespace {

// Exact flow of u' = u(1-u) over time a.
double logistic_flow(double u, double a) {
    double ea = std::exp(a);
    return u * ea / (1.0 + u * (ea - 1.0));
}

}  // namespace

Field rd_step(const Field& u_prev, double h, const OperatorSpec& diffusion, ReactionKind f) {
    if (!(h > 0.0)) throw std::invalid_argument("rd_step: h must be positive");
    Field u = u_prev;
    auto react = [&](double a) {
        if (f == ReactionKind::None) return;
        for (double& v : u.values) v = logistic_flow(v, a);
    };
    react(0.5 * h);
    if (u.grid.geometry == Geometry::Periodic &&
        (diffusion.kind == OperatorKind::FracSpectral ||
         diffusion.kind == OperatorKind::ClassicalLaplacian)) {
        double s = diffusion.kind == OperatorKind::ClassicalLaplacian ? 1.0 : diffusion.s;
        u = heat_convolve(u, h, s);
    } else {
        Eigen::MatrixXd a = dense_operator_matrix(u.grid, diffusion);
        u = itd_step_dense(u, h, Nonlinearity::identity(), a, StepControl{});
        u.time -= h;  // time accounting handled below
    }
    react(0.5 * h);
    if (f == ReactionKind::Logistic) {
        for (double& v : u.values) {
            if (v < -1e-8 || v > 1.0 + 1e-8)
                throw std::runtime_error("rd_step: state left [0,1]");
            v = std::clamp(v, 0.0, 1.0);
        }
    }
    u.time = u_prev.time + h;
    return u;
}

namespace {

// Spectral antiderivative of a zero-mean periodic field, zero-mean
// normalized.
Field spectral_antiderivative(const Field& f) {
    cvec spec = fft_forward(f.values);
    spec[0] = 0.0;
    for (int k = 1; k < f.grid.n; ++k) {
        double xi = wavenumber(f.grid, k);
        spec[k] /= std::complex<double>(0.0, xi);
    }
    spec[f.grid.n / 2] = 0.0;
    Field out(f.grid, f.time);
    out.values = fft_inverse_real(std::move(spec));
    return out;
}

}  // namespace

BurgersReport burgers_check(const Field& u0, double t_end, const StepControl& control) {
    const Grid1D& g = u0.grid;
    if (g.geometry != Geometry::Periodic)
        throw std::invalid_argument("burgers_check: periodic grid required");
    double sup = lp_norm(u0, std::numeric_limits<double>::infinity());
    if (std::abs(mass(u0)) > 1e-10 * (1.0 + sup) * g.length)
        throw std::invalid_argument("burgers_check: data must have zero mean");
    Field v0 = spectral_antiderivative(u0);
    // v' = u, so characteristics cross at t = 1 / max(-u)
    double steep = 0.0;
    for (double w : u0.values) steep = std::max(steep, -w);
    if (steep > 0.0 && t_end >= 1.0 / steep)
        throw std::invalid_argument("burgers_check: horizon reaches shock formation; comparison refused");

    auto v0_at = [&](double x) {
        double pos = (x - g.left) / g.dx();
        double fl = std::floor(pos);
        int j = static_cast<int>(fl);
        double frac = pos - fl;
        int jm = ((j % g.n) + g.n) % g.n;
        return (1.0 - frac) * v0[jm] + frac * v0[(jm + 1) % g.n];
    };
    double vmax = lp_norm(v0, std::numeric_limits<double>::infinity());
    std::vector<double> vref(g.n);
    for (int i = 0; i < g.n; ++i) {
        double x = g.x(i);
        double lo = x - t_end * vmax - g.dx(), hi = x + t_end * vmax + g.dx();
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            if (mid + t_end * v0_at(mid) < x)
                lo = mid;
            else
                hi = mid;
        }
        vref[i] = v0_at(0.5 * (lo + hi));
    }

    BurgersReport rep;
    rep.s_values = {0.9, 0.95, 0.99};
    for (double s : rep.s_values) {
        Field u = u0;
        while (u.time < t_end - 1e-12) {
            StepControl sub = control;
            sub.h = std::min(control.h, t_end - u.time);
            u = pmfp_step(u, sub, s);
        }
        Field v = spectral_antiderivative(u);
        double dev = 0.0;
        for (int i = 0; i < g.n; ++i) dev = std::max(dev, std::abs(v[i] - vref[i]));
        rep.deviations.push_back(dev);
    }
    rep.decreasing = rep.deviations[0] >= rep.deviations[1] && rep.deviations[1] >= rep.deviations[2];
    return rep;
}

}  // namespace fraclab
