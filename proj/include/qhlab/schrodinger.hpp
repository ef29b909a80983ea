#pragma once

#include <vector>

#include "qhlab/fields.hpp"
#include "qhlab/potential.hpp"

namespace qhlab {

// Time stepping plan for the split-step integrator. Snapshots are kept at
// every record_every-th step counting from the initial state, plus the final
// step always; a record_every larger than steps keeps just those two.
struct EvolutionConfig {
    double dt = 1e-3;
    std::size_t steps = 1000;
    std::size_t record_every = 1'000'000'000;
};

struct Snapshot {
    double time = 0.0;
    ComplexField psi;
};

struct HydroSnapshot {
    double time = 0.0;
    HydroField hydro;
};

// Strang-split spectral integrator for i dPsi/dt = (-d^2/dx^2 + V) Psi:
// half potential kick, full kinetic step in Fourier space, half potential
// kick. Unitary up to roundoff; throws NumericError naming the step if the
// state stops being finite.
std::vector<Snapshot> split_step_evolve(const ComplexField& psi0, const Potential1D& v,
                                        const EvolutionConfig& cfg);

// Closed-form free packet: starts as e^{i p0 x} e^{-(x-x0)^2 / (2 sigma^2)}
// (normalized) and spreads with complex width a + it, a = sigma^2/2, while
// the centroid drifts at speed 2 p0.
ComplexField free_gaussian_oracle(double sigma, double p0, double x0, double t,
                                  const Grid1D& grid);

// Closed-form coherent state of V = x^2: a rigid ground-state Gaussian whose
// center swings as d cos(2t) with momentum -d sin(2t) and global phase
// -t + d^2 sin(4t)/4. d = 0 reduces to the stationary ground state.
ComplexField coherent_state_oracle(double d, double t, const Grid1D& grid);

// <Psi| -d^2/dx^2 + V |Psi>: kinetic part summed spectrally, potential part
// on the grid.
double energy(const ComplexField& psi, const Potential1D& v);

// Free-space evolution of the two-packet state up to cfg.steps * cfg.dt,
// reported as density/current snapshots. Requires the run to last at least
// half the packets' meeting time L / (2 p0).
std::vector<HydroSnapshot> evolve_pair_to_interference(const GaussianPairParams& p,
                                                       const Grid1D& grid,
                                                       const EvolutionConfig& cfg,
                                                       double drift_sign = -1.0);

// Mean distance between adjacent density maxima inside |x| <= window,
// sub-grid refined by a parabola through each peak triple. Throws
// NumericError when fewer than two peaks exist.
double fringe_spacing(const HydroField& h, double window = 6.0);

// (max - min of rho over |x| <= window) / global max of rho: near zero for a
// flat central plateau, order one once fringes develop.
double fringe_contrast(const HydroField& h, double window = 2.0);

}  // namespace qhlab
