#pragma once

#include <complex>
#include <vector>

#include "qhlab/grid.hpp"

namespace qhlab {

using cdouble = std::complex<double>;

// FFT workspace for one grid size: owns FFTW plans (created under a global
// planner mutex — the FFTW planner is not thread-safe) plus the wavenumber
// table. Each concurrent worker should own its own workspace; execution on a
// given workspace is not reentrant, but distinct workspaces run in parallel.
class Spectral {
  public:
    explicit Spectral(const Grid1D& grid);
    ~Spectral();
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    const Grid1D& grid() const { return grid_; }
    // Wavenumbers in FFT layout: 0, 1, ..., n/2, -(n/2-1), ..., -1 times 2pi/L.
    const std::vector<double>& wavenumbers() const { return k_; }

    // Unnormalized forward DFT and 1/n-normalized inverse.
    void forward(const cdouble* in, cdouble* out) const;
    void inverse(const cdouble* in, cdouble* out) const;

    // Spectral d/dx of a complex field.
    std::vector<cdouble> derivative(const std::vector<cdouble>& f) const;
    // Spectral d/dx and d^2/dx^2 of real fields (imaginary leakage dropped).
    // The Nyquist mode is zeroed in the first derivative so the result of
    // differentiating a real field stays real.
    std::vector<double> derivative(const std::vector<double>& f) const;
    std::vector<double> second_derivative(const std::vector<double>& f) const;

    // Project a real field onto the modes with |k| <= (2/3) k_max (the
    // classical de-aliasing cutoff), in place. The mean (k = 0) is untouched,
    // so integrals of the field are preserved exactly.
    void low_pass(std::vector<double>& f) const;

    // Damp the top of the band in place with the smooth taper
    // exp(-36 (|k|/k_max)^8): below half band the bite is under 1e-7 per
    // application, at the 2/3 de-aliasing cutoff it is ~25%, and the Nyquist
    // mode is reduced by e^-36. The mean is untouched.
    void damp_top_band(std::vector<double>& f) const;

  private:
    Grid1D grid_;
    std::vector<double> k_;
    void* plan_fwd_ = nullptr;  // fftw_plan, kept opaque here
    void* plan_inv_ = nullptr;
    mutable std::vector<cdouble> buf_a_, buf_b_;
};

// Unwrap the complex arguments of a sampled field into a continuous phase:
// S[0] = principal arg of f[0], then successive increments wrapped to
// (-pi, pi]. Increments with magnitude above max_step (default 3.0 rad) are
// rejected as resolution failures (NumericError) — a genuine phase cannot be
// tracked across steps that large.
std::vector<double> unwrap_phase(const std::vector<cdouble>& f, double max_step = 3.0);

// Least-squares straight line y = slope*x + intercept, plus r^2.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qhlab
