#include "qhlab/quantization.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "qhlab/errors.hpp"

namespace qhlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Sum accumulator in signed log10-magnitude space: immune to overflow from
// non-terminating series growth.
struct SignedLogSum {
    double sign = 0.0;
    double log10_mag = kNegInf;

    void add(double term_sign, double term_log10) {
        if (term_sign == 0.0 || term_log10 == kNegInf) return;
        if (sign == 0.0) {
            sign = term_sign;
            log10_mag = term_log10;
            return;
        }
        const double hi = std::max(log10_mag, term_log10);
        const double lo = std::min(log10_mag, term_log10);
        if (sign == term_sign) {
            log10_mag = hi + std::log1p(std::pow(10.0, lo - hi)) / std::numbers::ln10;
            return;
        }
        if (lo == hi) {  // exact cancellation
            sign = 0.0;
            log10_mag = kNegInf;
            return;
        }
        if (term_log10 > log10_mag) sign = term_sign;
        log10_mag = hi + std::log1p(-std::pow(10.0, lo - hi)) / std::numbers::ln10;
    }
};

double b_term(const RecurrenceSpec& spec, int j) {
    return spec.b_over_alpha ? spec.b_over_alpha(j) : 0.0;
}

void require_branch(int branch) {
    if (branch != 0 && branch != 1)
        throw ConfigError("series branch must be 0 (even) or 1 (odd)");
}

// One parity branch summed in signed log space; ratio_at(j) supplies the
// two-step recurrence, extra_log10 a final multiplicative factor.
BranchDiagnosis diagnose_branch(int branch, int j_cut, double x, double extra_log10,
                                const std::function<double(int)>& ratio_at) {
    require_branch(branch);
    BranchDiagnosis diag;
    const double log10_absx = std::log10(std::abs(x));
    const double x_negative_sign = x < 0.0 ? -1.0 : 1.0;
    double coeff_sign = 1.0;
    double coeff_log10 = 0.0;
    SignedLogSum sum;
    for (int j = branch; j <= j_cut; j += 2) {
        const double parity_sign = (j % 2 == 1) ? x_negative_sign : 1.0;
        sum.add(coeff_sign * parity_sign, coeff_log10 + j * log10_absx);
        const double ratio = ratio_at(j);
        if (ratio == 0.0) {
            diag.terminates = true;
            diag.termination_index = j;
            break;
        }
        coeff_sign *= (ratio < 0.0) ? -1.0 : 1.0;
        coeff_log10 += std::log10(std::abs(ratio));
    }
    diag.sign = sum.sign;
    diag.log10_partial = sum.log10_mag + extra_log10;
    diag.value = sum.sign * std::pow(10.0, diag.log10_partial);
    return diag;
}

}  // namespace

RecurrenceSpec harmonic_ladder_spec() {
    RecurrenceSpec spec;
    spec.c0 = 1.0;
    spec.c1 = -1.0;
    spec.c2 = -1.0;
    spec.c4 = 0.0;
    spec.b_over_alpha = [](int j) { return 4.0 * j + 2.0; };
    return spec;
}

double ee3_ratio(int j, double E, const RecurrenceSpec& spec) {
    if (j < 0) throw ConfigError("ee3_ratio: index must be non-negative");
    if (spec.c0 == 0.0) throw ConfigError("ee3_ratio: c0 must be nonzero (it divides)");
    const double numerator =
        spec.c2 + 2.0 * j * spec.c1 - (E - spec.c4) * spec.c0 + b_term(spec, j);
    return -numerator / ((j + 1.0) * (j + 2.0) * spec.c0);
}

double ee4_energy(int j, const RecurrenceSpec& spec) {
    if (j < 0) throw ConfigError("ee4_energy: index must be non-negative");
    if (spec.c0 == 0.0) throw ConfigError("ee4_energy: c0 must be nonzero (it divides)");
    return spec.c4 + (spec.c2 + b_term(spec, j) + 2.0 * spec.c1 * j) / spec.c0;
}

double hermite_ratio(int j, double E) {
    if (j < 0) throw ConfigError("hermite_ratio: index must be non-negative");
    return (2.0 * j + 1.0 - E) / ((j + 1.0) * (j + 2.0));
}

std::vector<double> terminating_energies(int j_max) {
    if (j_max < 0) throw ConfigError("terminating_energies: j_max must be non-negative");
    std::vector<double> out(static_cast<std::size_t>(j_max) + 1);
    for (int j = 0; j <= j_max; ++j) out[static_cast<std::size_t>(j)] = 2.0 * j + 1.0;
    return out;
}

double legendre_ratio(int j, double lambda) {
    if (j < 0) throw ConfigError("legendre_ratio: index must be non-negative");
    return -(lambda - static_cast<double>(j) * (j + 1.0)) / ((j + 1.0) * (j + 2.0));
}

double quantized_lambda(int j) {
    if (j < 0) throw ConfigError("quantized_lambda: index must be non-negative");
    return static_cast<double>(j) * (static_cast<double>(j) + 1.0);
}

namespace {

SeriesState build_series(int j_max, int branch, const std::function<double(int)>& ratio_at) {
    require_branch(branch);
    if (j_max < branch) throw ConfigError("series: j_max below the branch seed index");
    SeriesState st;
    st.start_index = branch;
    double coeff = 1.0;
    for (int j = branch; j <= j_max; j += 2) {
        st.coefficients.push_back(coeff);
        if (coeff != 0.0) {
            const double ratio = ratio_at(j);
            if (ratio == 0.0 && !st.termination_index) st.termination_index = j;
            coeff *= ratio;
        }
    }
    return st;
}

}  // namespace

SeriesState hermite_series(double E, int j_max, int branch) {
    return build_series(j_max, branch, [E](int j) { return hermite_ratio(j, E); });
}

SeriesState legendre_series(double lambda, int j_max, int branch) {
    return build_series(j_max, branch, [lambda](int j) { return legendre_ratio(j, lambda); });
}

TailDiagnosis series_tail_diagnosis(double E, double x_probe, int j_cut) {
    if (x_probe == 0.0) throw ConfigError("series_tail_diagnosis: probe position must be nonzero");
    if (j_cut < 20) throw ConfigError("series_tail_diagnosis: j_cut must be at least 20");
    const double tail_log10 = -x_probe * x_probe / 2.0 / std::numbers::ln10;
    const auto ratio_at = [E](int j) { return hermite_ratio(j, E); };
    TailDiagnosis diag;
    diag.even = diagnose_branch(0, j_cut, x_probe, tail_log10, ratio_at);
    diag.odd = diagnose_branch(1, j_cut, x_probe, tail_log10, ratio_at);
    return diag;
}

double hermite_partial_log10(double E, double x_probe, int j_cut, int branch) {
    if (x_probe == 0.0) throw ConfigError("hermite_partial_log10: probe position must be nonzero");
    const double tail_log10 = -x_probe * x_probe / 2.0 / std::numbers::ln10;
    return diagnose_branch(branch, j_cut, x_probe, tail_log10,
                           [E](int j) { return hermite_ratio(j, E); })
        .log10_partial;
}

TailDiagnosis legendre_tail_diagnosis(double lambda, int j_cut) {
    if (j_cut < 20) throw ConfigError("legendre_tail_diagnosis: j_cut must be at least 20");
    const double u = 1.0 - 1e-6;  // just inside the pole at u = 1
    const auto ratio_at = [lambda](int j) { return legendre_ratio(j, lambda); };
    TailDiagnosis diag;
    diag.even = diagnose_branch(0, j_cut, u, 0.0, ratio_at);
    diag.odd = diagnose_branch(1, j_cut, u, 0.0, ratio_at);
    return diag;
}

std::vector<double> discretized_spectrum(const Potential1D& v, const Grid1D& grid,
                                         std::size_t k) {
    if (v.values.size() != grid.n)
        throw ConfigError("discretized_spectrum: potential does not match the grid");
    if (k == 0) throw ConfigError("discretized_spectrum: need at least one eigenvalue");
    if (k > grid.n / 4)
        throw ConfigError("discretized_spectrum: k must not exceed n/4 (upper FD spectrum is junk)");
    // Dirichlet walls at x_min and x_max; unknowns at the n-1 interior grid
    // points x_min + i dx, i = 1..n-1.
    const std::size_t m = grid.n - 1;
    const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
    std::vector<double> diag(m), off(m - 1, -inv_dx2);
    for (std::size_t i = 0; i < m; ++i) diag[i] = 2.0 * inv_dx2 + v.values[i + 1];
    const lapack_int info =
        LAPACKE_dsterf(static_cast<lapack_int>(m), diag.data(), off.data());
    if (info != 0)
        throw NumericError("discretized_spectrum: tridiagonal eigensolve failed with status " +
                           std::to_string(info));
    return {diag.begin(), diag.begin() + static_cast<std::ptrdiff_t>(k)};
}

std::vector<RadialSample> radial_solution(double lambda, double c1,
                                          const std::vector<double>& r_samples) {
    std::vector<RadialSample> out;
    out.reserve(r_samples.size());
    for (double r : r_samples) {
        if (!(r > 0.0))
            throw ConfigError("radial_solution: radii must be positive, got " +
                              std::to_string(r));
        RadialSample s;
        s.r = r;
        s.amplitude = c1 * std::pow(r, lambda / 2.0);
        const double derivative =
            lambda == 0.0 ? 0.0 : c1 * (lambda / 2.0) * std::pow(r, lambda / 2.0 - 1.0);
        s.scale_residual = 2.0 * r * derivative - lambda * s.amplitude;
        const double s_prime = 0.0;  // separated solution carries no radial flow
        s.flow_residual = r * s_prime;
        out.push_back(s);
    }
    return out;
}

double angular_imaginary_residual(double m, const std::vector<double>& theta_samples,
                                  const std::vector<double>& phi_samples,
                                  const std::function<double(double)>& radial,
                                  const std::function<double(double)>& radial_theta) {
    const auto r_of = radial ? radial : [](double) { return 1.0; };
    const auto rt_of = radial_theta ? radial_theta : [](double) { return 0.0; };
    // S = m phi: every S derivative below is constant or zero, and R has no
    // phi dependence; the expression vanishes term by term.
    const double s_theta = 0.0;
    const double s_theta_theta = 0.0;
    const double s_phi = m;
    const double s_phi_phi = 0.0;
    double worst = 0.0;
    for (double theta : theta_samples) {
        const double big_r = r_of(theta);
        const double big_r_theta = rt_of(theta);
        const double r_phi = 0.0;
        for (double phi : phi_samples) {
            (void)phi;  // S_phi and S_phi_phi are already constants in phi
            const double residual =
                std::sin(theta) * (std::cos(theta) * s_theta +
                                   std::sin(theta) * (s_theta_theta * big_r +
                                                      2.0 * s_theta * big_r_theta)) +
                s_phi_phi * big_r + 2.0 * s_phi * r_phi;
            worst = std::max(worst, std::abs(residual));
        }
    }
    return worst;
}

WindingReport nonquantized_m_witness(double m,
                                     const std::function<double(double)>& radial_profile,
                                     const std::vector<double>& radii,
                                     const std::vector<double>& phis) {
    if (!radial_profile) throw ConfigError("nonquantized_m_witness: need a radial profile");
    if (radii.empty() || phis.empty())
        throw ConfigError("nonquantized_m_witness: need at least one radius and one angle");
    WindingReport rep;
    double rho_scale = 0.0, current_scale = 0.0, psi_scale = 0.0;
    const double two_pi = 2.0 * std::numbers::pi;
    for (double r : radii) {
        if (!(r > 0.0)) throw ConfigError("nonquantized_m_witness: radii must be positive");
        const double amp = radial_profile(r);
        for (double phi : phis) {
            const std::complex<double> psi_here = amp * std::polar(1.0, m * phi);
            const std::complex<double> psi_wound = amp * std::polar(1.0, m * (phi + two_pi));
            const double rho_here = std::norm(psi_here);
            const double rho_wound = std::norm(psi_wound);
            // J_phi = Im(conj(psi) d_phi psi)/r = m |psi|^2 / r.
            const double current_here = m * rho_here / r;
            const double current_wound = m * rho_wound / r;
            rep.rho_gap = std::max(rep.rho_gap, std::abs(rho_wound - rho_here));
            rep.current_gap = std::max(rep.current_gap, std::abs(current_wound - current_here));
            rep.wavefunction_gap = std::max(rep.wavefunction_gap, std::abs(psi_wound - psi_here));
            rho_scale = std::max(rho_scale, std::abs(rho_here));
            current_scale = std::max(current_scale, std::abs(current_here));
            psi_scale = std::max(psi_scale, std::abs(psi_here));
        }
    }
    const double winding_budget = 1e-9 * (1.0 + std::abs(m));
    rep.rho_single_valued = rep.rho_gap <= winding_budget * std::max(rho_scale, 1e-30);
    rep.current_single_valued =
        rep.current_gap <= winding_budget * std::max(current_scale, 1e-30);
    rep.wavefunction_single_valued =
        rep.wavefunction_gap <= winding_budget * std::max(psi_scale, 1e-30);
    return rep;
}

ComplexField hermite_eigenstate(int j, const Grid1D& grid) {
    if (j < 0) throw ConfigError("hermite_eigenstate: level must be non-negative");
    if (j > 60) throw ConfigError("hermite_eigenstate: polynomial recurrence untested beyond 60");
    ComplexField psi;
    psi.grid = grid;
    psi.values.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        double h_prev = 1.0, h_cur = 2.0 * x;
        double h = (j == 0) ? h_prev : h_cur;
        for (int level = 1; level < j; ++level) {
            const double h_next = 2.0 * x * h_cur - 2.0 * level * h_prev;
            h_prev = h_cur;
            h_cur = h_next;
            h = h_cur;
        }
        psi.values[i] = h * std::exp(-x * x / 2.0);
    }
    return normalized(std::move(psi));
}

}  // namespace qhlab
