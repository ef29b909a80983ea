#include "qhlab/fields.hpp"

#include <cmath>
#include <numbers>

#include "qhlab/errors.hpp"

namespace qhlab {

double norm(const ComplexField& psi) {
    double s = 0.0;
    for (const cdouble& v : psi.values) s += std::norm(v);
    return s * psi.grid.dx;
}

double norm(const HydroField& h) {
    double s = 0.0;
    for (double r : h.rho) s += r;
    return s * h.grid.dx;
}

ComplexField normalized(ComplexField psi) {
    const double n = norm(psi);
    if (!(n > 0.0) || !std::isfinite(n))
        throw NumericError("normalized: field has non-positive or non-finite norm");
    const double scale = 1.0 / std::sqrt(n);
    for (cdouble& v : psi.values) v *= scale;
    psi.is_normalized = true;
    return psi;
}

double pair_normalization_constant(const GaussianPairParams& p) {
    // Each packet integrates to 2 sigma sqrt(pi) (effective width 2 sigma);
    // the overlap integral contributes q = exp(-L^2/(4 sigma^2) - p0^2 sigma^2).
    const double q =
        std::exp(-p.L * p.L / (4.0 * p.sigma * p.sigma) - p.p0 * p.p0 * p.sigma * p.sigma);
    return 1.0 / std::sqrt(2.0 * p.sigma * std::sqrt(std::numbers::pi) * (1.0 + q));
}

ComplexField gaussian_pair(const GaussianPairParams& p, const Grid1D& grid,
                           double drift_sign) {
    if (!(p.sigma > 0.0)) throw ConfigError("gaussian_pair: sigma must be positive");
    if (!(p.L > 0.0)) throw ConfigError("gaussian_pair: L must be positive");
    if (p.sigma > p.L / 5.0)
        throw ConfigError("gaussian_pair: packets overlap too much (need sigma <= L/5)");
    if (grid.x_min > -p.L - 10.0 * p.sigma || grid.x_max < p.L + 10.0 * p.sigma)
        throw ConfigError("gaussian_pair: box too small to hold both packets with 10-sigma margin");
    if (drift_sign != 1.0 && drift_sign != -1.0)
        throw ConfigError("gaussian_pair: drift_sign must be +1 or -1");

    ComplexField psi;
    psi.grid = grid;
    psi.values.resize(grid.n);
    const double inv_w2 = 1.0 / (2.0 * p.sigma * p.sigma);  // exponent of phi(u) = e^{-u^2/(2 sigma^2)}
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        const double ul = (x + p.L) / 2.0;
        const double ur = (x - p.L) / 2.0;
        const double left = std::exp(-ul * ul * inv_w2);
        const double right = std::exp(-ur * ur * inv_w2);
        const double ph = drift_sign * p.p0 * x;
        psi.values[i] = left + right * cdouble(std::cos(ph), std::sin(ph));
    }
    psi = normalized(std::move(psi));
    return psi;
}

HydroField to_hydro(const ComplexField& psi) {
    Spectral sp(psi.grid);
    const std::vector<cdouble> dpsi = sp.derivative(psi.values);
    HydroField h;
    h.grid = psi.grid;
    h.rho.resize(psi.grid.n);
    h.current.resize(psi.grid.n);
    for (std::size_t i = 0; i < psi.grid.n; ++i) {
        h.rho[i] = std::norm(psi.values[i]);
        h.current[i] = std::imag(std::conj(psi.values[i]) * dpsi[i]);
    }
    h.is_normalized = psi.is_normalized;
    return h;
}

ComplexField from_hydro(const HydroField& h, double anchor_phase) {
    const std::size_t n = h.grid.n;
    for (std::size_t i = 0; i < n; ++i)
        if (!(h.rho[i] > kRhoFloor))
            throw NodeError("from_hydro: density vanishes at x = " + std::to_string(h.grid.x(i)) +
                            "; phase is not reconstructible across a node");
    // S' = J/rho, integrated by the cumulative trapezoid rule from x_min.
    std::vector<double> s(n);
    s[0] = anchor_phase;
    double prev = h.current[0] / h.rho[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double cur = h.current[i] / h.rho[i];
        s[i] = s[i - 1] + 0.5 * (prev + cur) * h.grid.dx;
        prev = cur;
    }
    ComplexField psi;
    psi.grid = h.grid;
    psi.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double amp = std::sqrt(h.rho[i]);
        psi.values[i] = amp * cdouble(std::cos(s[i]), std::sin(s[i]));
    }
    psi.is_normalized = h.is_normalized;
    return psi;
}

}  // namespace qhlab
