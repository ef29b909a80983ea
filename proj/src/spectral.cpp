#include "qhlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "qhlab/errors.hpp"

namespace qhlab {

namespace {
// FFTW's planner mutates global state; serialize plan creation/destruction.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace

Spectral::Spectral(const Grid1D& grid) : grid_(grid), buf_a_(grid.n), buf_b_(grid.n) {
    const std::size_t n = grid_.n;
    k_.resize(n);
    const double dk = 2.0 * std::numbers::pi / grid_.length();
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<long long>(i);
        const auto half = static_cast<long long>(n / 2);
        k_[i] = dk * static_cast<double>(j <= half ? j : j - static_cast<long long>(n));
    }
    std::lock_guard<std::mutex> lock(planner_mutex());
    // FFTW_UNALIGNED: plans stay valid for any caller buffer alignment, which
    // keeps execution reusable across std::vector storage.
    plan_fwd_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(buf_a_.data()),
                                 as_fftw(buf_b_.data()), FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_inv_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(buf_a_.data()),
                                 as_fftw(buf_b_.data()), FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_fwd_ || !plan_inv_) throw NumericError("spectral: FFTW plan creation failed");
}

Spectral::~Spectral() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_inv_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void Spectral::forward(const cdouble* in, cdouble* out) const {
    // Out-of-place c2c transforms do not modify the input array.
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), as_fftw(const_cast<cdouble*>(in)),
                     as_fftw(out));
}

void Spectral::inverse(const cdouble* in, cdouble* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_inv_), as_fftw(const_cast<cdouble*>(in)),
                     as_fftw(out));
    const double scale = 1.0 / static_cast<double>(grid_.n);
    for (std::size_t i = 0; i < grid_.n; ++i) out[i] *= scale;
}

std::vector<cdouble> Spectral::derivative(const std::vector<cdouble>& f) const {
    const std::size_t n = grid_.n;
    forward(f.data(), buf_a_.data());
    for (std::size_t i = 0; i < n; ++i) buf_a_[i] *= cdouble(0.0, k_[i]);
    buf_a_[n / 2] = 0.0;  // Nyquist has no well-defined sign for d/dx
    std::vector<cdouble> out(n);
    inverse(buf_a_.data(), out.data());
    return out;
}

std::vector<double> Spectral::derivative(const std::vector<double>& f) const {
    const std::size_t n = grid_.n;
    for (std::size_t i = 0; i < n; ++i) buf_b_[i] = f[i];
    forward(buf_b_.data(), buf_a_.data());
    for (std::size_t i = 0; i < n; ++i) buf_a_[i] *= cdouble(0.0, k_[i]);
    buf_a_[n / 2] = 0.0;
    inverse(buf_a_.data(), buf_b_.data());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = buf_b_[i].real();
    return out;
}

std::vector<double> Spectral::second_derivative(const std::vector<double>& f) const {
    const std::size_t n = grid_.n;
    for (std::size_t i = 0; i < n; ++i) buf_b_[i] = f[i];
    forward(buf_b_.data(), buf_a_.data());
    for (std::size_t i = 0; i < n; ++i) buf_a_[i] *= -k_[i] * k_[i];
    inverse(buf_a_.data(), buf_b_.data());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = buf_b_[i].real();
    return out;
}

void Spectral::low_pass(std::vector<double>& f) const {
    const std::size_t n = grid_.n;
    for (std::size_t i = 0; i < n; ++i) buf_b_[i] = f[i];
    forward(buf_b_.data(), buf_a_.data());
    const std::size_t cut = n / 3;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t mode = i <= n / 2 ? i : n - i;  // |signed mode index|
        if (mode > cut) buf_a_[i] = 0.0;
    }
    inverse(buf_a_.data(), buf_b_.data());
    for (std::size_t i = 0; i < n; ++i) f[i] = buf_b_[i].real();
}

void Spectral::damp_top_band(std::vector<double>& f) const {
    const std::size_t n = grid_.n;
    for (std::size_t i = 0; i < n; ++i) buf_b_[i] = f[i];
    forward(buf_b_.data(), buf_a_.data());
    const double half = static_cast<double>(n / 2);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t mode = i <= n / 2 ? i : n - i;
        const double u = static_cast<double>(mode) / half;
        const double u2 = u * u;
        const double u8 = u2 * u2 * u2 * u2;
        buf_a_[i] *= std::exp(-36.0 * u8);
    }
    inverse(buf_a_.data(), buf_b_.data());
    for (std::size_t i = 0; i < n; ++i) f[i] = buf_b_[i].real();
}

std::vector<double> unwrap_phase(const std::vector<cdouble>& f, double max_step) {
    std::vector<double> s(f.size());
    if (f.empty()) return s;
    s[0] = std::arg(f[0]);
    for (std::size_t i = 1; i < f.size(); ++i) {
        // arg(f_i / f_{i-1}) is the increment already wrapped to (-pi, pi].
        double inc = std::arg(f[i] * std::conj(f[i - 1]));
        if (!(std::abs(inc) <= max_step))
            throw NumericError("unwrap: phase step " + std::to_string(inc) + " at sample " +
                               std::to_string(i) + " exceeds the trustable resolution");
        s[i] = s[i - 1] + inc;
    }
    return s;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw ConfigError("fit_line: need >= 2 paired samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

}  // namespace qhlab
