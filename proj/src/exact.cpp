#include "fraclab/exact.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "fraclab/fft.hpp"
#include "fraclab/nonlocal.hpp"

namespace fraclab {
namespace {

double sq(double v) { return v * v; }

// int_{-1}^{1} (1 - tau^2)^q dtau = sqrt(pi) Gamma(q+1) / Gamma(q+3/2)
double symmetric_beta(double q) {
    return std::sqrt(std::numbers::pi) * std::tgamma(q + 1.0) / std::tgamma(q + 1.5);
}

struct PmeConstants {
    double alpha, beta, k, C;
};

PmeConstants pme_constants(double m, int N, double M) {
    if (N != 1) throw std::invalid_argument("pme_barenblatt: mass calibration implemented for N=1");
    auto [alpha, beta] = pme_exponents(m, N);
    double k = (m - 1.0) * beta / (2.0 * m);
    // mass = C^{1/(m-1)+1/2} k^{-1/2} I with I the profile integral
    double I = symmetric_beta(1.0 / (m - 1.0));
    double C = std::pow(M * std::sqrt(k) / I, 1.0 / (1.0 / (m - 1.0) + 0.5));
    return {alpha, beta, k, C};
}

}  // namespace

std::pair<double, double> pme_exponents(double m, int N) {
    if (!(m > 1.0)) throw std::invalid_argument("pme_exponents: m must exceed 1");
    double denom = N * (m - 1.0) + 2.0;
    return {N / denom, 1.0 / denom};
}

std::pair<double, double> fde_exponents(double m, int N) {
    double mc = (N - 2.0) / N;
    if (!(m > mc && m < 1.0))
        throw std::invalid_argument("fde_exponents: m must lie in ((N-2)/N, 1)");
    double denom = 2.0 - N * (1.0 - m);
    return {N / denom, 1.0 / denom};
}

double pme_barenblatt(double x, double t, double m, int N, double M) {
    if (!(t > 0.0)) throw std::invalid_argument("pme_barenblatt: t must be positive");
    PmeConstants c = pme_constants(m, N, M);
    double xi = x * std::pow(t, -c.beta);
    double prof = c.C - c.k * xi * xi;
    if (prof <= 0.0) return 0.0;
    return std::pow(t, -c.alpha) * std::pow(prof, 1.0 / (m - 1.0));
}

double pme_support_edge(double t, double m, int N, double M) {
    PmeConstants c = pme_constants(m, N, M);
    return std::sqrt(c.C / c.k) * std::pow(t, c.beta);
}

double pme_pressure(double x, double t, double m, int N, double M) {
    double u = pme_barenblatt(x, t, m, N, M);
    return (m / (m - 1.0)) * std::pow(u, m - 1.0);
}

double fde_barenblatt(double x, double t, double m, int N, double M) {
    if (!(t > 0.0)) throw std::invalid_argument("fde_barenblatt: t must be positive");
    if (N != 1) throw std::invalid_argument("fde_barenblatt: mass calibration implemented for N=1");
    if (!(m > 0.0))
        throw std::invalid_argument(
            "fde_barenblatt: profile constant k = (1-m)beta/(2m) degenerates at m <= 0; "
            "evaluate m -> 0 as a limit");
    auto [alpha, beta] = fde_exponents(m, N);
    double k = (1.0 - m) * beta / (2.0 * m);
    double q = 1.0 / (1.0 - m);
    // mass = C^{1/2-q} k^{-1/2} J with J = int (1+tau^2)^{-q} dtau
    double J = std::sqrt(std::numbers::pi) * std::tgamma(q - 0.5) / std::tgamma(q);
    double C = std::pow(M * std::sqrt(k) / J, 1.0 / (0.5 - q));
    double xi = x * std::pow(t, -beta);
    return std::pow(t, -alpha) * std::pow(C + k * xi * xi, -q);
}

double logdiff_extinction(double r, double t, double a, double T) {
    if (!(a > 0.0)) throw std::invalid_argument("logdiff_extinction: a must be positive");
    if (!(t >= 0.0 && t < T)) throw std::invalid_argument("logdiff_extinction: need 0 <= t < T");
    return 8.0 * a * a * (T - t) / sq(a * a + r * r);
}

namespace {

// Spectral derivative on a periodic field.
Field spectral_derivative(const Field& f) {
    cvec spec = fft_forward(f.values);
    for (int k = 0; k < f.grid.n; ++k)
        spec[k] *= std::complex<double>(0.0, wavenumber(f.grid, k));
    // the Nyquist mode has no conjugate partner; drop it for a real result
    spec[f.grid.n / 2] = 0.0;
    Field out(f.grid, f.time);
    out.values = fft_inverse_real(std::move(spec));
    return out;
}

double pmfp_mass_integral(double s) { return symmetric_beta(1.0 - s); }

double pmfp_amplitude(double B, double s) {
    return std::pow(std::sqrt(B) / pmfp_mass_integral(s), 2.0 / (3.0 - 2.0 * s));
}

// Signed stationarity defect of the rescaled profile at a probe point
// inside the support: dp/dy + beta*y should vanish there.
double pmfp_defect(double B, double s) {
    double beta = 1.0 / (3.0 - 2.0 * s);
    double A = pmfp_amplitude(B, s);
    double R = std::sqrt(A / B);
    Grid1D g(-4.0 * R, 8.0 * R, 2048, Geometry::Periodic);
    Field F = sample(g, [&](double y) {
        double prof = A - B * y * y;
        return prof > 0.0 ? std::pow(prof, 1.0 - s) : 0.0;
    });
    Field p = inverse_riesz(F, s, true);
    Field dp = spectral_derivative(p);
    double y0 = 0.5 * R;
    int j = static_cast<int>(std::lround((y0 - g.left) / g.dx()));
    return dp[j] + beta * g.x(j);
}

}  // namespace

std::pair<double, double> pmfp_constants(double s) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("pmfp_constants: s must lie in (0,1)");
    static std::map<double, std::pair<double, double>> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(s);
        if (it != cache.end()) return it->second;
    }
    double lo = 1e-4, hi = 10.0;
    double dlo = pmfp_defect(lo, s), dhi = pmfp_defect(hi, s);
    if (dlo * dhi > 0.0) throw std::runtime_error("pmfp_constants: bracket failure");
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        double d = pmfp_defect(mid, s);
        if (d * dlo <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            dlo = d;
        }
    }
    double B = 0.5 * (lo + hi);
    std::pair<double, double> res{pmfp_amplitude(B, s), B};
    std::lock_guard<std::mutex> lock(mu);
    cache[s] = res;
    return res;
}

double pmfp_profile(double x, double t, double s) {
    if (!(t > 0.0)) throw std::invalid_argument("pmfp_profile: t must be positive");
    auto [A, B] = pmfp_constants(s);
    double beta = 1.0 / (3.0 - 2.0 * s);
    double y = x * std::pow(t, -beta);
    double prof = A - B * y * y;
    if (prof <= 0.0) return 0.0;
    return std::pow(t, -beta) * std::pow(prof, 1.0 - s);
}

KppWave kpp_wave(double c, const std::function<double(double)>& f,
                 const std::function<double(double)>& fprime) {
    KppWave wave;
    wave.c = c;
    double cstar = 2.0 * std::sqrt(fprime(0.0));
    if (c < cstar - 1e-12) {
        // below the minimal speed the orbit spirals at the origin and no
        // monotone connection exists
        wave.monotone = false;
        return wave;
    }
    const double xi_lo = -40.0, xi_hi = 40.0;
    const double h = 0.005;
    const int nsteps = static_cast<int>(std::lround((xi_hi - xi_lo) / h));

    // phi' = psi, psi' = c psi - f(phi)
    auto rhs = [&](double phi, double psi, double& dphi, double& dpsi) {
        dphi = psi;
        dpsi = c * psi - f(phi);
    };
    // Forward shooting out of the node at 0 cannot cross the saddle at 1
    // on a domain this long (errors amplify by the saddle's unstable
    // exponent over tens of units, far beyond double precision), so the
    // connection is traced backward from the saddle instead: started on
    // the approach eigendirection, it is an attractor when integrated
    // toward decreasing xi.
    double nu = 0.5 * (c - std::sqrt(c * c - 4.0 * fprime(1.0)));  // negative
    auto back_step = [&](double& phi, double& psi) {
        double k1p, k1q, k2p, k2q, k3p, k3q, k4p, k4q;
        rhs(phi, psi, k1p, k1q);
        rhs(phi - 0.5 * h * k1p, psi - 0.5 * h * k1q, k2p, k2q);
        rhs(phi - 0.5 * h * k2p, psi - 0.5 * h * k2q, k3p, k3q);
        rhs(phi - h * k3p, psi - h * k3q, k4p, k4q);
        phi -= h * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0;
        psi -= h * (k1q + 2.0 * k2q + 2.0 * k3q + k4q) / 6.0;
    };
    wave.xi.resize(nsteps + 1);
    wave.phi.resize(nsteps + 1);
    double eps0 = 1e-9;
    double phi = 1.0 - eps0, psi = -nu * eps0;
    wave.xi[nsteps] = xi_hi;
    wave.phi[nsteps] = phi;
    for (int i = nsteps; i > 0; --i) {
        back_step(phi, psi);
        phi = std::min(std::max(phi, 0.0), 1.0);
        wave.xi[i - 1] = xi_lo + (i - 1) * h;
        wave.phi[i - 1] = phi;
    }
    bool monotone = true;
    for (int i = 1; i <= nsteps; ++i)
        if (wave.phi[i] < wave.phi[i - 1] - 1e-12) monotone = false;
    wave.monotone = monotone && std::abs(wave.phi.back() - 1.0) < 1e-6;
    // fourth-order finite-difference resubstitution residual, away from
    // the clamped endpoints
    double worst = 0.0;
    for (int i = 2; i + 2 < static_cast<int>(wave.phi.size()); ++i) {
        const std::vector<double>& p = wave.phi;
        double d1 = (-p[i + 2] + 8.0 * p[i + 1] - 8.0 * p[i - 1] + p[i - 2]) / (12.0 * h);
        double d2 =
            (-p[i + 2] + 16.0 * p[i + 1] - 30.0 * p[i] + 16.0 * p[i - 1] - p[i - 2]) /
            (12.0 * h * h);
        worst = std::max(worst, std::abs(-d2 + c * d1 - f(p[i])));
    }
    wave.residual = worst;
    return wave;
}

}  // namespace fraclab
