#include "fraclab/nonlocal.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "fraclab/fft.hpp"

namespace fraclab {
namespace {

// The hypersingular integral is discretized through the even part of the
// difference, g(u) = 2f(x) - f(x+u) - f(x-u), which vanishes like u^2 at
// the singularity. On [0,h] g is modeled as a*u^2 + b*u^4 fitted to the
// first two nodes; beyond h it is interpolated by piecewise quadratics
// on two-cell panels and integrated against the kernel u^{-1-2s}
// analytically. The result is a symmetric weight sequence W_k with
// (Af)_i = sum_k W_k (2f_i - f_{i+k} - f_{i-k}) = sum_j W_{|i-j|}(f_i - f_j).

// Kernel moment: int_a^b u^{p-1-2s} du.
double kmoment(int p, double a, double b, double s) {
    double e = p - 2.0 * s;
    if (e == 0.0) return std::log(b / a);
    if (a == 0.0) return std::pow(b, e) / e;  // requires e > 0
    return (std::pow(b, e) - std::pow(a, e)) / e;
}

// Kernel tail integral: int_R^inf u^{-1-2s} du.
double ktail(double R, double s) { return std::pow(R, -2.0 * s) / (2.0 * s); }

// Weights W_1..W_{count-1}; W_0 stays 0.
std::vector<double> kernel_weights(int count, double h, double s) {
    std::vector<double> w(count, 0.0);
    // singular cell [0,h]: g = a u^2 + b u^4 with a h^2 + b h^4 = G_1,
    // 4 a h^2 + 16 b h^4 = G_2
    double m2 = kmoment(2, 0.0, h, s);
    double m4 = kmoment(4, 0.0, h, s);
    if (count > 1) w[1] += 16.0 * m2 / (12.0 * h * h) - 4.0 * m4 / (12.0 * h * h * h * h);
    if (count > 2) w[2] += -m2 / (12.0 * h * h) + m4 / (12.0 * h * h * h * h);
    // regular panels [a, a+2h] with nodes a, a+h, a+2h, a = (2m-1)h
    for (int m = 1; 2 * m - 1 < count; ++m) {
        double a = (2 * m - 1) * h;
        double j0 = kmoment(0, a, a + 2.0 * h, s);
        double j1 = kmoment(1, a, a + 2.0 * h, s) - a * j0;
        double j2 = kmoment(2, a, a + 2.0 * h, s) - 2.0 * a * kmoment(1, a, a + 2.0 * h, s) +
                    a * a * j0;
        int k = 2 * m - 1;
        w[k] += (j2 - 3.0 * h * j1 + 2.0 * h * h * j0) / (2.0 * h * h);
        if (k + 1 < count) w[k + 1] += -(j2 - 2.0 * h * j1) / (h * h);
        if (k + 2 < count) w[k + 2] += (j2 - h * j1) / (2.0 * h * h);
    }
    return w;
}

// Periodic folding over box images on both sides plus an integral
// remainder for the far images.
std::vector<double> periodic_weights(int n, double h, double s) {
    const int images = 16;
    std::vector<double> wl = kernel_weights((images + 1) * n + 2, h, s);
    std::vector<double> w(n, 0.0);
    for (int d = 1; d < n; ++d) {
        w[d] = wl[d];
        for (int p = 1; p <= images; ++p) w[d] += wl[d + p * n] + wl[p * n - d];
        w[d] += ktail((d + (images + 0.5) * n) * h, s) / n;
        w[d] += ktail(((images + 0.5) * n - d) * h, s) / n;
    }
    return w;
}

// Zero-exterior contribution for cell i of a truncated box: the weight
// series continued over virtual exterior nodes on both sides.
double exterior_weight(int i, int n, const std::vector<double>& suffix) {
    return suffix[i + 1] + suffix[n - i];
}

// suffix[k] = sum_{j>=k} W_j including the analytic far tail.
std::vector<double> weight_suffix_sums(int n, double h, double s) {
    const int reach = 32;
    std::vector<double> wl = kernel_weights(reach * n + 2, h, s);
    std::vector<double> suffix(n + 1, 0.0);
    double acc = ktail((reach * n + 1.5) * h, s);
    for (int k = reach * n + 1; k > n; --k) acc += wl[k];
    for (int k = n; k >= 1; --k) {
        acc += wl[k];
        suffix[k] = acc;
    }
    return suffix;
}

}  // namespace

OperatorSpec::OperatorSpec(OperatorKind k, double order) : kind(k), s(order) {
    if (k != OperatorKind::ClassicalLaplacian) {
        if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("OperatorSpec: s must lie in (0,1)");
        if (k == OperatorKind::CFL && s <= 0.5)
            throw std::invalid_argument("OperatorSpec: CFL requires s > 1/2");
    }
}

double OperatorSpec::gamma() const {
    switch (kind) {
        case OperatorKind::RFL: return s;
        case OperatorKind::SFL: return 1.0;
        case OperatorKind::CFL: return s - 0.5;
        default: return 1.0;
    }
}

double quadrature_normalization(double s) {
    static std::map<double, double> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(s);
        if (it != cache.end()) return it->second;
    }
    // Plane-wave calibration: require the discrete symbol to equal
    // |xi|^{2s} at xi = 1 on the box [-pi, pi) with n = 2048.
    const int n = 2048;
    const double h = 2.0 * std::numbers::pi / n;
    std::vector<double> w = periodic_weights(n, h, s);
    double sigma_raw = 0.0;
    for (int d = 1; d < n; ++d) sigma_raw += w[d] * (1.0 - std::cos(d * h));
    double c = 1.0 / sigma_raw;
    std::lock_guard<std::mutex> lock(mu);
    cache[s] = c;
    return c;
}

std::vector<double> pair_weights(const Grid1D& g, double s) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("pair_weights: s must lie in (0,1)");
    const double c = quadrature_normalization(s);
    std::vector<double> w = g.geometry == Geometry::Periodic ? periodic_weights(g.n, g.dx(), s)
                                                             : kernel_weights(g.n, g.dx(), s);
    for (double& v : w) v *= c;
    return w;
}

Field apply_spectral(const Field& f, double s) {
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("apply_spectral: s must lie in (0,1]");
    return apply_symbol(f, [s](double xi) { return xi == 0.0 ? 0.0 : std::pow(xi, 2.0 * s); });
}

Field apply_quadrature(const Field& f, double s, std::vector<std::string>* warnings) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("apply_quadrature: s must lie in (0,1)");
    const Grid1D& g = f.grid;
    const int n = g.n;
    const double h = g.dx();
    const double c = quadrature_normalization(s);
    Field out(g, f.time);
    if (g.geometry == Geometry::Periodic) {
        std::vector<double> w = periodic_weights(n, h, s);
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int d = 1; d < n; ++d) acc += (f[i] - f[(i + d) % n]) * w[d];
            out[i] = c * acc;
        }
    } else {
        if (!decay_budget_ok(f) && warnings)
            warnings->push_back("apply_quadrature: field does not decay at truncation edges");
        std::vector<double> w = kernel_weights(n, h, s);
        std::vector<double> suffix = weight_suffix_sums(n, h, s);
        for (int i = 0; i < n; ++i) {
            double acc = f[i] * exterior_weight(i, n, suffix);
            for (int j = 0; j < n; ++j)
                if (j != i) acc += (f[i] - f[j]) * w[std::abs(i - j)];
            out[i] = c * acc;
        }
    }
    return out;
}

namespace {

// 8-point Gauss-Legendre nodes/weights on [-1,1].
constexpr double kGL8x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                             -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                             0.7966664774136267,  0.9602898564975363};
constexpr double kGL8w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                             0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};

// Tail integral int_{t0}^inf e^{-lambda t} t^{-1-s} dt via log-time
// substitution and composite Gauss-Legendre with `panels` panels.
double semigroup_tail(double lambda, double s, double t0, int panels) {
    double vmax = std::log(40.0 / (lambda * t0));
    if (vmax <= 0.0) vmax = 1.0;
    double acc = 0.0;
    double len = vmax / panels;
    for (int p = 0; p < panels; ++p) {
        double a = p * len;
        for (int j = 0; j < 8; ++j) {
            double v = a + 0.5 * len * (1.0 + kGL8x[j]);
            acc += 0.5 * len * kGL8w[j] * std::exp(-lambda * t0 * std::exp(v) - s * v);
        }
    }
    return acc * std::pow(t0, -s);
}

}  // namespace

double semigroup_power(double lambda, double s, const SemigroupQuad& quad) {
    if (lambda == 0.0) return 0.0;
    // Split point t0 = min(1, 1/lambda) keeps the power series on
    // (0, t0] free of cancellation for large modes.
    double t0 = std::min(1.0, 1.0 / lambda);
    double series = 0.0;
    double term_num = 1.0;  // (-lambda)^k / k!
    for (int k = 1; k <= 60; ++k) {
        term_num *= -lambda / k;
        double term = term_num * std::pow(t0, k - s) / (k - s);
        series += term;
        if (std::abs(term) < 1e-18 * (std::abs(series) + 1e-300)) break;
    }
    int panels = quad.laguerre_nodes / 8;
    double tail = semigroup_tail(lambda, s, t0, panels) - std::pow(t0, -s) / s;
    double tail_fine = semigroup_tail(lambda, s, t0, 2 * panels) - std::pow(t0, -s) / s;
    double inv_gamma = -s / std::tgamma(1.0 - s);
    double result = inv_gamma * (series + tail_fine);
    if (std::abs(tail_fine - tail) > quad.tolerance * (std::abs(result) + 1.0))
        throw std::runtime_error("semigroup_power: tail quadrature did not converge");
    return result;
}

Field apply_semigroup(const Field& f, double s, const SemigroupQuad& quad) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("apply_semigroup: s must lie in (0,1)");
    return apply_symbol(f, [&](double xi) {
        return xi == 0.0 ? 0.0 : semigroup_power(xi * xi, s, quad);
    });
}

Field inverse_riesz(const Field& f, double s, bool subtract_mean) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("inverse_riesz: s must lie in (0,1)");
    Field g = f;
    if (subtract_mean) {
        double mean = mass(f) / f.grid.length;
        for (double& v : g.values) v -= mean;
    } else {
        double l1 = lp_norm(f, 1.0);
        if (l1 > 0.0 && std::abs(mass(f)) > 1e-10 * l1)
            throw std::invalid_argument("inverse_riesz: input must have zero mean");
    }
    return apply_symbol(g, [s](double xi) { return xi == 0.0 ? 0.0 : std::pow(xi, -2.0 * s); });
}

Field DenseOperator::apply(const Field& f) const {
    Eigen::Map<const Eigen::VectorXd> v(f.values.data(), f.size());
    Eigen::VectorXd r = mat * v;
    Field out(grid, f.time);
    Eigen::Map<Eigen::VectorXd>(out.values.data(), out.size()) = r;
    return out;
}

DenseOperator rfl_matrix(const Grid1D& g, double s) {
    if (g.geometry != Geometry::DirichletExterior)
        throw std::invalid_argument("rfl_matrix: DirichletExterior geometry required");
    const int n = g.n;
    const double h = g.dx();
    const double c = quadrature_normalization(s);
    std::vector<double> w = kernel_weights(n, h, s);
    std::vector<double> suffix = weight_suffix_sums(n, h, s);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = exterior_weight(i, n, suffix);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double wij = w[std::abs(i - j)];
            a(i, j) = -c * wij;
            diag += wij;
        }
        a(i, i) = c * diag;
    }
    return {g, std::move(a)};
}

DenseOperator cfl_matrix(const Grid1D& g, double s) {
    if (g.geometry == Geometry::Periodic)
        throw std::invalid_argument("cfl_matrix: interval geometry required");
    if (!(s > 0.5 && s < 1.0))
        throw std::invalid_argument("cfl_matrix: censored operator requires s in (1/2,1)");
    const int n = g.n;
    const double h = g.dx();
    const double c = quadrature_normalization(s);
    std::vector<double> w = kernel_weights(n, h, s);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double wij = w[std::abs(i - j)];
            a(i, j) = -c * wij;
            diag += wij;
        }
        a(i, i) = c * diag;
    }
    return {g, std::move(a)};
}

double sfl_eigenvalue(const Grid1D& g, int j) {
    double k = j * std::numbers::pi / g.length;
    return k * k;
}

Field sfl_eigenfunction(const Grid1D& g, int j) {
    double norm = std::sqrt(2.0 / g.length);
    Field phi(g);
    for (int i = 0; i < g.n; ++i)
        phi[i] = norm * std::sin(j * std::numbers::pi * (g.x(i) - g.left) / g.length);
    return phi;
}

Field sfl_apply(const Field& f, double s, int modes) {
    const Grid1D& g = f.grid;
    if (g.geometry == Geometry::Periodic)
        throw std::invalid_argument("sfl_apply: interval geometry required");
    if (modes > g.n) throw std::invalid_argument("sfl_apply: modes must not exceed n");
    Field out(g, f.time);
    for (int j = 1; j <= modes; ++j) {
        Field phi = sfl_eigenfunction(g, j);
        double coeff = inner(f, phi) / inner(phi, phi);
        double amp = std::pow(sfl_eigenvalue(g, j), s) * coeff;
        for (int i = 0; i < g.n; ++i) out[i] += amp * phi[i];
    }
    return out;
}

DenseOperator sfl_matrix(const Grid1D& g, double s, int modes) {
    if (modes < 0) modes = g.n;
    if (modes > g.n) throw std::invalid_argument("sfl_matrix: modes must not exceed n");
    const int n = g.n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int j = 1; j <= modes; ++j) {
        Field phi = sfl_eigenfunction(g, j);
        Eigen::Map<const Eigen::VectorXd> v(phi.values.data(), n);
        double scale = std::pow(sfl_eigenvalue(g, j), s) * g.dx() / (inner(phi, phi));
        a += scale * (v * v.transpose());
    }
    return {g, std::move(a)};
}

SpectralDecomposition eigs(const DenseOperator& op, int k) {
    const int n = op.grid.n;
    if (k > n) throw std::invalid_argument("eigs: k must not exceed n");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.mat);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigs: eigensolver failed");
    SpectralDecomposition d;
    double inv_sqrt_dx = 1.0 / std::sqrt(op.grid.dx());
    for (int j = 0; j < k; ++j) {
        d.eigenvalues.push_back(solver.eigenvalues()(j));
        Field phi(op.grid);
        Eigen::VectorXd v = solver.eigenvectors().col(j);
        // deterministic sign: largest-magnitude component positive
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
        if (v(imax) < 0.0) v = -v;
        for (int i = 0; i < n; ++i) phi[i] = v(i) * inv_sqrt_dx;
        d.eigenfunctions.push_back(std::move(phi));
    }
    return d;
}

SpectralDecomposition sfl_eigs(const Grid1D& g, double s, int k) {
    if (k > g.n) throw std::invalid_argument("sfl_eigs: k must not exceed n");
    SpectralDecomposition d;
    for (int j = 1; j <= k; ++j) {
        d.eigenvalues.push_back(std::pow(sfl_eigenvalue(g, j), s));
        Field phi = sfl_eigenfunction(g, j);
        double nrm = std::sqrt(inner(phi, phi));
        for (double& v : phi.values) v /= nrm;
        d.eigenfunctions.push_back(std::move(phi));
    }
    return d;
}

}  // namespace fraclab
