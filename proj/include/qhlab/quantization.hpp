#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qhlab/fields.hpp"
#include "qhlab/potential.hpp"

namespace qhlab {

// Constant parts of the tail-factor decomposition driving the generalized
// two-step coefficient recurrence: c0 from h, c1 from h'/x, c2 from h'',
// c4 from V + S'^2. b_over_alpha supplies the residual constant b_j/alpha_j
// per index (empty function means identically zero).
struct RecurrenceSpec {
    double c0 = 1.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c4 = 0.0;
    std::function<double(int)> b_over_alpha;
};

// The worked spec whose closed-form energies come out as the harmonic ladder
// 2j+1: c0=1, c1=-1, c2=-1, c4=0, b/alpha = 4j+2.
RecurrenceSpec harmonic_ladder_spec();

// Generalized recurrence ratio alpha_{j+2}/alpha_j =
// -[c2 + 2 j c1 - (E - c4) c0 + b_j/alpha_j] / ((j+1)(j+2) c0).
double ee3_ratio(int j, double E, const RecurrenceSpec& spec);

// Energy that zeroes that ratio's numerator:
// E_j = c4 + (c2 + b_j/alpha_j + 2 c1 j) / c0.
double ee4_energy(int j, const RecurrenceSpec& spec);

// Exact Hermite-series ratio for V = x^2 with tail e^{-x^2/2}:
// alpha_{j+2}/alpha_j = (2j+1 - E)/((j+1)(j+2)).
double hermite_ratio(int j, double E);

// Energies at which the Hermite series terminates: {2j+1 : j = 0..j_max},
// exact integers.
std::vector<double> terminating_energies(int j_max);

// Exact Legendre-series ratio in u = cos(theta):
// a_{j+2}/a_j = -(lambda - j(j+1))/((j+1)(j+2)).
double legendre_ratio(int j, double lambda);

// lambda = j(j+1), exact integer arithmetic.
double quantized_lambda(int j);

// One parity branch of a two-step series: coefficients of x^{start_index},
// x^{start_index+2}, ...; termination_index is the last index carrying a
// nonzero coefficient when the recurrence hit an exact zero.
struct SeriesState {
    int start_index = 0;
    std::vector<double> coefficients;
    std::optional<int> termination_index;
};

SeriesState hermite_series(double E, int j_max, int branch);
SeriesState legendre_series(double lambda, int j_max, int branch);

// Partial-sum diagnosis of one parity branch, accumulated in signed
// log-magnitude space so non-terminating growth never overflows.
struct BranchDiagnosis {
    bool terminates = false;
    int termination_index = -1;
    double log10_partial = 0.0;  // log10 |partial sum|
    double sign = 0.0;
    double value = 0.0;          // sign * 10^log10_partial (inf if too large)
};

struct TailDiagnosis {
    BranchDiagnosis even;
    BranchDiagnosis odd;
};

// Hermite branches summed to j_cut at x_probe, including the e^{-x^2/2} tail
// factor: quantized E terminates into a polynomial; other E grow like the
// non-normalizable e^{+x^2/2} tail.
TailDiagnosis series_tail_diagnosis(double E, double x_probe, int j_cut);

// Low-level accessor used by growth-rate assertions: log10 |partial sum| of
// one branch at index cutoff j_cut.
double hermite_partial_log10(double E, double x_probe, int j_cut, int branch);

// Legendre branches summed to j_cut at u = 1 - 1e-6: off-lattice lambda has
// ratio -> 1 tails that diverge at the poles.
TailDiagnosis legendre_tail_diagnosis(double lambda, int j_cut);

// Lowest k eigenvalues of the second-order finite-difference discretization
// of -d^2/dx^2 + V with Dirichlet walls at both box edges (an independent
// check on the series spectra). Requires k <= n/4.
std::vector<double> discretized_spectrum(const Potential1D& v, const Grid1D& grid,
                                         std::size_t k);

// Closed-form separated radial amplitude R(r) = c1 r^{lambda/2} plus the
// residuals of its two defining equations, evaluated with the analytic
// derivative: scale_residual = 2 r R' - lambda R, flow_residual = r S' with
// S' = 0 for the separated solution.
struct RadialSample {
    double r = 0.0;
    double amplitude = 0.0;
    double scale_residual = 0.0;
    double flow_residual = 0.0;
};

std::vector<RadialSample> radial_solution(double lambda, double c1,
                                          const std::vector<double>& r_samples);

// Imaginary-part residual of the separated polar flow with S = m phi and R a
// function of theta only: sin(t)(cos(t) S_t + sin(t)(S_tt R + 2 S_t R_t)) +
// S_pp R + 2 S_p R_p, which vanishes term by term. Returns max |residual|
// over the sample product set.
double angular_imaginary_residual(
    double m, const std::vector<double>& theta_samples, const std::vector<double>& phi_samples,
    const std::function<double(double)>& radial = nullptr,
    const std::function<double(double)>& radial_theta = nullptr);

// Single-valuedness audit of psi = R(r) e^{i m phi} under phi -> phi + 2 pi:
// rho and the azimuthal current J = m R^2 / r never notice the winding, the
// wavefunction does unless m is an integer.
struct WindingReport {
    bool rho_single_valued = false;
    bool current_single_valued = false;
    bool wavefunction_single_valued = false;
    double rho_gap = 0.0;
    double current_gap = 0.0;
    double wavefunction_gap = 0.0;
};

WindingReport nonquantized_m_witness(double m,
                                     const std::function<double(double)>& radial_profile,
                                     const std::vector<double>& radii,
                                     const std::vector<double>& phis);

// Normalized j-th eigenstate of V = x^2 sampled on the grid (real-valued),
// built from the polynomial recurrence; energy(psi, harmonic) = 2j+1.
ComplexField hermite_eigenstate(int j, const Grid1D& grid);

}  // namespace qhlab
