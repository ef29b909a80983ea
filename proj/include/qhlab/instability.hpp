#pragma once

#include <cstddef>
#include <vector>

#include "qhlab/fields.hpp"
#include "qhlab/spectral.hpp"

namespace qhlab {

// Grid indices of the probe interval [-ell, ell], each endpoint snapped to
// its nearest grid point; snap_distance is the larger of the two snaps.
struct ProbeInterval {
    std::size_t i_lo = 0;
    std::size_t i_hi = 0;
    double snap_distance = 0.0;
};

ProbeInterval probe_interval(const Grid1D& grid, double ell);

// Trapezoid quadrature of J/rho over [-ell, ell]: the unwrapped phase drop
// S(ell) - S(-ell). NodeError if rho falls below the reconstruction floor
// anywhere on the interval.
double phase_difference(const HydroField& h, double ell);

// J <- J + eps uniformly; rho untouched.
HydroField perturb_current(const HydroField& h, double eps);

// eps * trapezoid(1/rho over [-ell, ell]): the phase response to a uniform
// eps-perturbation of the current. On shared quadrature nodes this equals
// phase_difference(perturb_current(h, eps)) - phase_difference(h) exactly
// (up to rounding) -- see phase_shift_identity_residual.
double perturbed_phase_shift(const HydroField& h, double ell, double eps);

// The defect of that identity, evaluated in extended precision with the
// three quotients fused per node so the mathematical zero is not swamped by
// the ~eps/rho magnitude of each side separately.
double phase_shift_identity_residual(const HydroField& h, double ell, double eps);

// Idealized plateau response 2*ell / eps^(N-1); 0 for an empty interval.
double predicted_shift(double ell, double eps, int n_exponent);

// Plateau approximation of the full perturbed phase difference:
// (1/eps^N) * trapezoid(J) + 2*ell/eps^(N-1). An approximation by design;
// its mismatch against the exact quadrature is reported, not an error.
double general_perturbed_phase(const HydroField& h, double ell, double eps, int n_exponent);

// Phase of the two-packet state at one point, unwrapped continuously from
// deep inside the left packet's dominance region (where the phase is 0 to
// underflow accuracy). Quadrant-aware and valid through the fringe zone.
double analytic_pair_phase(double x, const GaussianPairParams& p);

// Same phase at every grid point, unwrapped by walking the grid from x_min.
std::vector<double> analytic_pair_phase_profile(const Grid1D& grid, const GaussianPairParams& p);

// Density eps^N exactly on [-ell, ell] with C1 Gaussian-bump shoulders
// (s(u) = u^2 e^{-u^2/2w^2}, u = |x|-ell) carrying the remaining mass so the
// field is normalized without touching the plateau value; J = 0.
HydroField plateau_profile(double eps, int n_exponent, double ell, const Grid1D& grid,
                           double shoulder_width = 2.0);

// Half-separation L at which the two-packet density at x = 0 equals eps^N
// (bisection to 1e-12 relative). CalibrationError when the target exceeds
// the closest legal separation's midpoint density.
double calibrate_separation(double eps, int n_exponent, double sigma, double ell,
                            double p0 = 0.0);

struct InstabilityConfig {
    enum class Profile { plateau, calibrated_pair };
    Profile profile = Profile::plateau;
    std::vector<double> epsilons;
    int n_exponent = 2;
    double ell = 1.0;
    double shoulder_width = 2.0;  // plateau only
    double sigma = 1.0;           // pair only
    double p0 = 2.0;              // pair only
};

struct SweepRow {
    double epsilon = 0.0;
    double s_base = 0.0;
    double s_perturbed = 0.0;
    double delta_s_exact = 0.0;
    double delta_s_predicted = 0.0;
    double rel_err = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by decreasing epsilon
    LineFit fit;                 // ln(delta_s_exact) vs ln(eps)
    std::size_t n_points = 0;
    bool fit_skipped = false;    // <4 points or <2 decades of eps span
};

// One row per epsilon (profile rebuilt and perturbed with that epsilon),
// computed concurrently up to `threads` workers; the table order and every
// value are independent of the thread count. The power-law fit uses natural
// logs, so a plateau yields slope -(N-1) and intercept ln(2*ell).
SweepResult epsilon_sweep(const InstabilityConfig& cfg, const Grid1D& grid,
                          unsigned threads = 1);

}  // namespace qhlab
