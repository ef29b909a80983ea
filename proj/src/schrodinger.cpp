#include "qhlab/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qhlab/errors.hpp"
#include "qhlab/spectral.hpp"

namespace qhlab {

namespace {

bool all_finite(const std::vector<cdouble>& v) {
    for (const cdouble& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

}  // namespace

std::vector<Snapshot> split_step_evolve(const ComplexField& psi0, const Potential1D& v,
                                        const EvolutionConfig& cfg) {
    if (v.values.size() != psi0.grid.n)
        throw ConfigError("split_step_evolve: potential does not match the grid");
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
        throw ConfigError("split_step_evolve: dt must be positive and finite");
    if (cfg.steps == 0) throw ConfigError("split_step_evolve: need at least one step");
    if (cfg.record_every == 0)
        throw ConfigError("split_step_evolve: record_every must be at least 1");
    if (!psi0.is_normalized)
        throw ConfigError("split_step_evolve: initial state must be normalized first");
    if (!all_finite(psi0.values))
        throw NumericError("split_step_evolve: initial state is not finite");

    const std::size_t n = psi0.grid.n;
    Spectral sp(psi0.grid);
    const std::vector<double> k = sp.wavenumbers();

    std::vector<cdouble> half_v(n), kinetic(n);
    for (std::size_t i = 0; i < n; ++i) {
        half_v[i] = std::polar(1.0, -v.values[i] * cfg.dt / 2.0);
        kinetic[i] = std::polar(1.0, -k[i] * k[i] * cfg.dt);
    }

    std::vector<Snapshot> out;
    out.push_back({0.0, psi0});

    std::vector<cdouble> psi = psi0.values;
    std::vector<cdouble> hat(n);
    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        for (std::size_t i = 0; i < n; ++i) psi[i] *= half_v[i];
        sp.forward(psi.data(), hat.data());
        for (std::size_t i = 0; i < n; ++i) hat[i] *= kinetic[i];
        sp.inverse(hat.data(), psi.data());
        for (std::size_t i = 0; i < n; ++i) psi[i] *= half_v[i];

        if (!all_finite(psi))
            throw NumericError("split_step_evolve: state became non-finite at step " +
                               std::to_string(step));
        const bool record = (step % cfg.record_every == 0) ||
                            step == cfg.steps;
        if (record) {
            Snapshot snap;
            snap.time = static_cast<double>(step) * cfg.dt;
            snap.psi.grid = psi0.grid;
            snap.psi.values = psi;
            snap.psi.is_normalized = psi0.is_normalized;
            out.push_back(std::move(snap));
        }
    }
    return out;
}

ComplexField free_gaussian_oracle(double sigma, double p0, double x0, double t,
                                  const Grid1D& grid) {
    if (!(sigma > 0.0)) throw ConfigError("free_gaussian_oracle: sigma must be positive");
    const double a = sigma * sigma / 2.0;
    const cdouble awidth(a, t);
    const cdouble prefactor =
        std::sqrt(cdouble(a, 0.0) / awidth) / std::pow(std::numbers::pi * sigma * sigma, 0.25);
    ComplexField psi;
    psi.grid = grid;
    psi.values.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        const double u = x - x0 - 2.0 * p0 * t;
        const cdouble envelope = std::exp(-u * u / (4.0 * awidth));
        const cdouble carrier = std::polar(1.0, p0 * x - p0 * p0 * t);
        psi.values[i] = prefactor * carrier * envelope;
    }
    psi.is_normalized = true;
    return psi;
}

ComplexField coherent_state_oracle(double d, double t, const Grid1D& grid) {
    const double xc = d * std::cos(2.0 * t);
    const double pc = -d * std::sin(2.0 * t);
    const double gamma = -t + d * d * std::sin(4.0 * t) / 4.0;
    const double prefactor = std::pow(std::numbers::pi, -0.25);
    ComplexField psi;
    psi.grid = grid;
    psi.values.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        psi.values[i] =
            prefactor * std::exp(-(x - xc) * (x - xc) / 2.0) * std::polar(1.0, pc * x + gamma);
    }
    psi.is_normalized = true;
    return psi;
}

double energy(const ComplexField& psi, const Potential1D& v) {
    if (v.values.size() != psi.grid.n)
        throw ConfigError("energy: potential does not match the grid");
    if (!psi.is_normalized)
        throw ConfigError("energy: state must be normalized first");
    const std::size_t n = psi.grid.n;
    Spectral sp(psi.grid);
    const std::vector<double> k = sp.wavenumbers();
    std::vector<cdouble> hat(n);
    sp.forward(psi.values.data(), hat.data());
    double kinetic = 0.0;
    for (std::size_t i = 0; i < n; ++i) kinetic += k[i] * k[i] * std::norm(hat[i]);
    kinetic *= psi.grid.dx / static_cast<double>(n);
    double potential = 0.0;
    for (std::size_t i = 0; i < n; ++i) potential += v.values[i] * std::norm(psi.values[i]);
    potential *= psi.grid.dx;
    return kinetic + potential;
}

std::vector<HydroSnapshot> evolve_pair_to_interference(const GaussianPairParams& p,
                                                       const Grid1D& grid,
                                                       const EvolutionConfig& cfg,
                                                       double drift_sign) {
    const double t_final = static_cast<double>(cfg.steps) * cfg.dt;
    if (p.p0 < 0.0)
        throw ConfigError("evolve_pair_to_interference: p0 must be non-negative");
    if (p.p0 > 0.0 && t_final < p.L / (2.0 * p.p0))
        throw ConfigError(
            "evolve_pair_to_interference: run too short; the packets need at least L/(2 p0) to "
            "meet");
    const ComplexField psi0 = gaussian_pair(p, grid, drift_sign);
    const Potential1D v = Potential1D::free_space(grid);
    const std::vector<Snapshot> snaps = split_step_evolve(psi0, v, cfg);
    std::vector<HydroSnapshot> out;
    out.reserve(snaps.size());
    for (const Snapshot& s : snaps) out.push_back({s.time, to_hydro(s.psi)});
    return out;
}

double fringe_spacing(const HydroField& h, double window) {
    const std::size_t n = h.grid.n;
    double rho_max = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(h.grid.x(i)) <= window) rho_max = std::max(rho_max, h.rho[i]);
    if (!(rho_max > 0.0)) throw NumericError("fringe_spacing: window holds no density");

    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double x = h.grid.x(i);
        if (std::abs(x) > window) continue;
        const double rm = h.rho[i - 1], r0 = h.rho[i], rp = h.rho[i + 1];
        if (!(r0 > rm && r0 > rp)) continue;
        if (r0 < 1e-3 * rho_max) continue;  // ignore ripples deep in the tails
        const double denom = rm - 2.0 * r0 + rp;
        const double shift = denom != 0.0 ? 0.5 * (rm - rp) / denom : 0.0;
        peaks.push_back(x + shift * h.grid.dx);
    }
    if (peaks.size() < 2)
        throw NumericError("fringe_spacing: fewer than two density maxima in the window");
    double mean = 0.0;
    for (std::size_t i = 1; i < peaks.size(); ++i) mean += peaks[i] - peaks[i - 1];
    return mean / static_cast<double>(peaks.size() - 1);
}

double fringe_contrast(const HydroField& h, double window) {
    const std::size_t n = h.grid.n;
    double global_max = 0.0;
    for (double r : h.rho) global_max = std::max(global_max, r);
    if (!(global_max > 0.0)) throw NumericError("fringe_contrast: density is identically zero");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    bool seen = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(h.grid.x(i)) > window) continue;
        lo = std::min(lo, h.rho[i]);
        hi = std::max(hi, h.rho[i]);
        seen = true;
    }
    if (!seen) throw ConfigError("fringe_contrast: window contains no grid points");
    return (hi - lo) / global_max;
}

}  // namespace qhlab
