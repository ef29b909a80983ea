#pragma once

#include <string>
#include <vector>

#include "qhlab/fields.hpp"
#include "qhlab/potential.hpp"

namespace qhlab {

// Hydrodynamic state (rho, S) with the current kept alongside for
// inspection; current = S' rho is re-derived from S inside each step.
struct MadelungState {
    HydroField hydro;
    std::vector<double> phase;
};

// Density level below which a point counts as vacuum for node detection:
// a step may leave at most one contiguous arc of the periodic box below this
// floor (the far tail); a second arc is an interior node in formation.
inline constexpr double kTrustFloor = 1e-12;

MadelungState make_state(const ComplexField& psi);

// Q = -(d^2/dx^2 sqrt(rho)) / sqrt(rho), evaluated spectrally. Points whose
// amplitude falls below 1e-150 report 0 (the quotient there is pure noise).
std::vector<double> quantum_potential(const HydroField& h);

// Same quotient from a signed amplitude R (rho = R^2). Works through zero
// crossings of R, where sqrt(rho) has a kink but R itself is smooth.
std::vector<double> quantum_potential_amplitude(const std::vector<double>& r,
                                                const Grid1D& grid);

// One RK4 step of d(rho)/dt = -2 d(S' rho)/dx, dS/dt = -(S')^2 - V - Q,
// integrated in the variables (ln rho, S): the quantum force becomes the
// division-free -L''/2 - (L')^2/4, the density stays positive by
// construction, and the tail's 170-decade dynamic range collapses to an
// O(100) log range the spectral derivatives handle cleanly. Spatial
// derivatives are spectral; the phase's secular linear ramp and the
// log-density's parabolic tail trend are split off before transforming and
// restored analytically. current is recomputed as S' rho.
// Preconditions: dt >= 0 and dt <= dx^2/4 (the RK4 stability ceiling for the
// k^2 dispersion of this system), rho > 0 everywhere, and the low-density
// set {rho < kTrustFloor} must be empty or one contiguous arc of the
// periodic box both before and after the step (a second arc means an
// interior node, where the velocity field is singular -- NodeError).
MadelungState madelung_step(const MadelungState& state, const Potential1D& v, double dt);

// Side-by-side run of the wavefunction integrator and the hydrodynamic one
// from the same initial state, recording sup-norm discrepancies of rho and J
// after every step. A NodeError mid-run yields a partial report with
// completed = false and the reason in note.
struct DiscrepancyReport {
    std::vector<double> time;
    std::vector<double> sup_rho_diff;
    std::vector<double> sup_current_diff;
    bool completed = false;
    std::string note;
};

DiscrepancyReport cross_validate(const ComplexField& initial, const Potential1D& v,
                                 double t_final, double dt);

}  // namespace qhlab
