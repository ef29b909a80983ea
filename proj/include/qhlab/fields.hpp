#pragma once

#include <complex>
#include <vector>

#include "qhlab/grid.hpp"
#include "qhlab/spectral.hpp"

namespace qhlab {

// Sampled wavefunction Psi on a grid. `is_normalized` marks fields whose
// discrete norm (sum |Psi|^2 dx) is 1 within 1e-12.
struct ComplexField {
    Grid1D grid;
    std::vector<cdouble> values;
    bool is_normalized = false;
};

// Hydrodynamic pair (rho, J): probability density and current density.
// Where rho = 0 the derived velocity J/rho is undefined and must not be read.
struct HydroField {
    Grid1D grid;
    std::vector<double> rho;
    std::vector<double> current;
    bool is_normalized = false;
};

// Two narrow Gaussian packets, centers -L and +L (the sampled profile is
// phi((x -+ L)/2), which doubles the effective width to 2*sigma), the right
// one carrying momentum drift_sign * p0. norm_const is recomputed at build
// time so the sampled field is normalized.
struct GaussianPairParams {
    double L = 10.0;
    double sigma = 1.0;
    double p0 = 2.0;
    double norm_const = 1.0;
};

// rho floor below which a phase cannot be reconstructed across a point.
inline constexpr double kRhoFloor = 1e-300;

double norm(const ComplexField& psi);
double norm(const HydroField& h);
ComplexField normalized(ComplexField psi);

// Build the two-packet state on the grid, renormalized there; drift_sign
// flips the drifting packet's momentum (-1 sends the right packet toward the
// left one). Preconditions: sigma <= L/5 and both packets inside the box
// (x_min <= -L - 10 sigma, x_max >= L + 10 sigma).
ComplexField gaussian_pair(const GaussianPairParams& p, const Grid1D& grid,
                           double drift_sign = 1.0);

// The normalizer the continuum state (1/sqrt(2))[phi_L + e^{i p0 x} phi_R]
// would carry; the sampled field uses the grid norm, which agrees to
// quadrature accuracy.
double pair_normalization_constant(const GaussianPairParams& p);

// rho = |Psi|^2, J = Im(conj(Psi) dPsi/dx) with the derivative evaluated
// spectrally; equals S' rho wherever rho > 0.
HydroField to_hydro(const ComplexField& psi);

// Psi = sqrt(rho) e^{iS}, S(x) = anchor_phase + cumulative trapezoid of
// J/rho from x_min. Every rho must exceed kRhoFloor (NodeError otherwise).
ComplexField from_hydro(const HydroField& h, double anchor_phase);

}  // namespace qhlab
