#include "qhlab/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qhlab/errors.hpp"
#include "qhlab/spectral.hpp"

namespace qhlab {

namespace {

constexpr double kAmplitudeFloor = 1e-150;

// {rho < kTrustFloor} must be empty or one contiguous arc of the periodic
// box; two or more arcs flag an interior node.
void check_single_low_density_arc(const std::vector<double>& rho) {
    const std::size_t n = rho.size();
    std::size_t transitions = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool low = rho[i] < kTrustFloor;
        const bool low_next = rho[(i + 1) % n] < kTrustFloor;
        if (low != low_next) ++transitions;
    }
    if (transitions > 2)
        throw NodeError(
            "madelung_step: density dips below its trusted floor in disconnected regions; an "
            "interior node makes the velocity field singular");
}

std::vector<double> quotient_of_second_derivative(const std::vector<double>& r,
                                                  const Spectral& sp) {
    const std::vector<double> rpp = sp.second_derivative(r);
    std::vector<double> q(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        q[i] = std::abs(r[i]) > kAmplitudeFloor ? -rpp[i] / r[i] : 0.0;
    return q;
}

// Both evolved fields are non-periodic by up to a parabola: the phase of a
// moving packet carries a linear ramp, and the log-density of a localized
// state is parabolic through its Gaussian tails. fit_tail_trend returns the
// least-squares parabola over the outermost samples; subtracting it leaves a
// residual that continues smoothly across the periodic seam, and the trend's
// derivatives are restored analytically after transforming.
struct TailTrend {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double operator()(double x) const { return a + b * x + c * x * x; }
};

TailTrend fit_tail_trend(const std::vector<double>& f, const Grid1D& grid) {
    const std::size_t n = f.size();
    const std::size_t m = std::min<std::size_t>(64, n / 4);
    double normal[3][4] = {};
    auto accumulate = [&](std::size_t i) {
        const double x = grid.x(i);
        const double row[3] = {1.0, x, x * x};
        for (int r = 0; r < 3; ++r) {
            for (int col = 0; col < 3; ++col) normal[r][col] += row[r] * row[col];
            normal[r][3] += row[r] * f[i];
        }
    };
    for (std::size_t i = 0; i < m; ++i) {
        accumulate(i);
        accumulate(n - 1 - i);
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(normal[r][col]) > std::abs(normal[pivot][col])) pivot = r;
        for (int cc = 0; cc < 4; ++cc) std::swap(normal[col][cc], normal[pivot][cc]);
        for (int r = col + 1; r < 3; ++r) {
            const double factor = normal[r][col] / normal[col][col];
            for (int cc = col; cc < 4; ++cc) normal[r][cc] -= factor * normal[col][cc];
        }
    }
    double sol[3];
    for (int r = 2; r >= 0; --r) {
        double acc = normal[r][3];
        for (int cc = r + 1; cc < 3; ++cc) acc -= normal[r][cc] * sol[cc];
        sol[r] = acc / normal[r][r];
    }
    return {sol[0], sol[1], sol[2]};
}

// First and second spectral derivatives of a field whose tails follow a
// parabola; returns the fitted trend.
TailTrend detrended_derivatives(const std::vector<double>& f, const Spectral& sp,
                                std::vector<double>& d1, std::vector<double>& d2) {
    const Grid1D& grid = sp.grid();
    const std::size_t n = f.size();
    const TailTrend trend = fit_tail_trend(f, grid);
    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = f[i] - trend(grid.x(i));
    d1 = sp.derivative(residual);
    d2 = sp.second_derivative(residual);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        d1[i] += trend.b + 2.0 * trend.c * x;
        d2[i] += 2.0 * trend.c;
    }
    return trend;
}

std::vector<double> phase_gradient(const std::vector<double>& s, const Spectral& sp) {
    std::vector<double> d1, d2;
    detrended_derivatives(s, sp, d1, d2);
    return d1;
}

struct StageRates {
    std::vector<double> dlog_rho;
    std::vector<double> ds;
};

// d(ln rho)/dt = -2 (S'' + S' L'),  dS/dt = -(S')^2 - V - Q with
// Q = -L''/2 - (L')^2/4. Everything is polynomial in the fields — no
// division by the density — so the rates stay well-conditioned through the
// deep tail, where ln rho is just a smooth parabola of O(100) magnitude.
StageRates rates(const std::vector<double>& lrho, const std::vector<double>& s,
                 const Potential1D& v, const Spectral& sp) {
    const std::size_t n = lrho.size();
    std::vector<double> lprime, lcurv, sprime, scurv;
    detrended_derivatives(lrho, sp, lprime, lcurv);
    detrended_derivatives(s, sp, sprime, scurv);
    StageRates out;
    out.dlog_rho.resize(n);
    out.ds.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.dlog_rho[i] = -2.0 * (scurv[i] + sprime[i] * lprime[i]);
        const double q = -0.5 * lcurv[i] - 0.25 * lprime[i] * lprime[i];
        out.ds[i] = -sprime[i] * sprime[i] - v.values[i] - q;
    }
    // De-alias the quadratic products: both rates contain squares of spectral
    // fields, whose top-third modes are aliasing artifacts on this grid.
    sp.low_pass(out.dlog_rho);
    sp.low_pass(out.ds);
    return out;
}

// Smoothly damp the top-band content of a field whose tails follow a
// parabola: the trend passes through untouched, so only the genuinely
// oscillatory residual is filtered. Without this, ripples that the sloped
// log-density amplifies on their way down the tail pile up against the
// de-aliasing cutoff — their escape route to higher wavenumbers — and grow
// exponentially at rate |L'| k_cut; the taper out-damps that growth at the
// top of the band while biting physical low-k content at roundoff level.
void damp_detrended(std::vector<double>& f, const Spectral& sp) {
    const Grid1D& grid = sp.grid();
    const TailTrend trend = fit_tail_trend(f, grid);
    std::vector<double> residual(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) residual[i] = f[i] - trend(grid.x(i));
    sp.damp_top_band(residual);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = trend(grid.x(i)) + residual[i];
}

// C^4 smoothstep on [0, 1].
double smoothstep(double u) {
    const double s = std::clamp(u, 0.0, 1.0);
    return s * s * s * s * s *
           (126.0 + s * (-420.0 + s * (540.0 + s * (-315.0 + s * 70.0))));
}

// Double precision cannot follow the true density once it falls below the
// level of the radiation the spectral bulk sheds (roundoff-scale amplitude,
// so density ~1e-32); in log variables that garbage would even grow like
// exp(|L'| k t) as it rides down the tail. Below the trusted floor the state
// is therefore slaved, with a C^4 blend in log-density level, to its own
// fitted tail parabola — the analytic continuation of a Gaussian skirt —
// which is a fixed point of the re-imposition and exact for every Gaussian
// tail. Dynamics at densities above the floor are never touched.
const double kSlaveLog = std::log(kTrustFloor) - 4.0 * std::numbers::ln10;
const double kLiveLog = std::log(kTrustFloor);

void impose_tail_armor(std::vector<double>& lrho, std::vector<double>& s, const Grid1D& grid) {
    const TailTrend ltrend = fit_tail_trend(lrho, grid);
    const TailTrend strend = fit_tail_trend(s, grid);
    for (std::size_t i = 0; i < lrho.size(); ++i) {
        const double w = smoothstep((lrho[i] - kSlaveLog) / (kLiveLog - kSlaveLog));
        if (w >= 1.0) continue;
        const double x = grid.x(i);
        lrho[i] = ltrend(x) + w * (lrho[i] - ltrend(x));
        s[i] = strend(x) + w * (s[i] - strend(x));
    }
}

}  // namespace

MadelungState make_state(const ComplexField& psi) {
    MadelungState st;
    st.hydro = to_hydro(psi);
    st.phase = unwrap_phase(psi.values);
    return st;
}

std::vector<double> quantum_potential(const HydroField& h) {
    Spectral sp(h.grid);
    std::vector<double> r(h.grid.n);
    for (std::size_t i = 0; i < h.grid.n; ++i) {
        if (h.rho[i] < 0.0)
            throw NumericError("quantum_potential: negative density at x = " +
                               std::to_string(h.grid.x(i)));
        r[i] = std::sqrt(h.rho[i]);
    }
    return quotient_of_second_derivative(r, sp);
}

std::vector<double> quantum_potential_amplitude(const std::vector<double>& r,
                                                const Grid1D& grid) {
    if (r.size() != grid.n)
        throw ConfigError("quantum_potential_amplitude: amplitude does not match the grid");
    Spectral sp(grid);
    return quotient_of_second_derivative(r, sp);
}

MadelungState madelung_step(const MadelungState& state, const Potential1D& v, double dt) {
    const Grid1D& grid = state.hydro.grid;
    const std::size_t n = grid.n;
    if (v.values.size() != n) throw ConfigError("madelung_step: potential does not match the grid");
    if (state.phase.size() != n || state.hydro.rho.size() != n)
        throw ConfigError("madelung_step: state arrays do not match the grid");
    if (!(dt >= 0.0)) throw ConfigError("madelung_step: dt must be non-negative");
    const double dt_max = grid.dx * grid.dx / 4.0;
    if (dt > dt_max * (1.0 + 1e-9))
        throw ConfigError("madelung_step: dt exceeds the dx^2/4 stability ceiling");
    check_single_low_density_arc(state.hydro.rho);
    if (dt == 0.0) return state;

    Spectral sp(grid);

    std::vector<double> l0(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(state.hydro.rho[i] > 0.0))
            throw NodeError("madelung_step: density vanishes at x = " +
                            std::to_string(grid.x(i)) +
                            "; the velocity field is singular at a node");
        l0[i] = std::log(state.hydro.rho[i]);
    }
    const std::vector<double>& s0 = state.phase;
    auto advanced = [&](const StageRates& k, double h) {
        std::pair<std::vector<double>, std::vector<double>> y{l0, s0};
        for (std::size_t i = 0; i < n; ++i) {
            y.first[i] += h * k.dlog_rho[i];
            y.second[i] += h * k.ds[i];
        }
        return y;
    };

    const StageRates k1 = rates(l0, s0, v, sp);
    const auto y2 = advanced(k1, dt / 2.0);
    const StageRates k2 = rates(y2.first, y2.second, v, sp);
    const auto y3 = advanced(k2, dt / 2.0);
    const StageRates k3 = rates(y3.first, y3.second, v, sp);
    const auto y4 = advanced(k3, dt);
    const StageRates k4 = rates(y4.first, y4.second, v, sp);

    std::vector<double> l_raw(n), s_raw(n), rho_raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        l_raw[i] = l0[i] + dt / 6.0 *
                               (k1.dlog_rho[i] + 2.0 * k2.dlog_rho[i] +
                                2.0 * k3.dlog_rho[i] + k4.dlog_rho[i]);
        s_raw[i] = s0[i] + dt / 6.0 * (k1.ds[i] + 2.0 * k2.ds[i] + 2.0 * k3.ds[i] + k4.ds[i]);
        if (!std::isfinite(l_raw[i]) || !std::isfinite(s_raw[i]))
            throw NumericError("madelung_step: state became non-finite at x = " +
                               std::to_string(grid.x(i)));
    }
    damp_detrended(l_raw, sp);
    damp_detrended(s_raw, sp);
    for (std::size_t i = 0; i < n; ++i) rho_raw[i] = std::exp(l_raw[i]);
    // Node detection looks at the filtered step result, before the tail armor
    // can smooth anything over.
    check_single_low_density_arc(rho_raw);
    impose_tail_armor(l_raw, s_raw, grid);

    MadelungState next;
    next.hydro.grid = grid;
    next.hydro.is_normalized = state.hydro.is_normalized;
    next.hydro.rho.resize(n);
    next.phase = std::move(s_raw);
    next.hydro.current.resize(n);
    for (std::size_t i = 0; i < n; ++i) next.hydro.rho[i] = std::exp(l_raw[i]);
    const std::vector<double> sprime = phase_gradient(next.phase, sp);
    for (std::size_t i = 0; i < n; ++i) next.hydro.current[i] = sprime[i] * next.hydro.rho[i];
    return next;
}

DiscrepancyReport cross_validate(const ComplexField& initial, const Potential1D& v,
                                 double t_final, double dt) {
    const Grid1D& grid = initial.grid;
    const std::size_t n = grid.n;
    if (!(dt > 0.0) || !(t_final > 0.0))
        throw ConfigError("cross_validate: t_final and dt must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));
    if (steps == 0) throw ConfigError("cross_validate: t_final is shorter than one step");

    Spectral sp(grid);
    const std::vector<double>& k = sp.wavenumbers();
    std::vector<cdouble> half_v(n), kinetic(n);
    for (std::size_t i = 0; i < n; ++i) {
        half_v[i] = std::polar(1.0, -v.values[i] * dt / 2.0);
        kinetic[i] = std::polar(1.0, -k[i] * k[i] * dt);
    }

    DiscrepancyReport report;
    std::vector<cdouble> psi = initial.values, hat(n), dpsi(n);
    MadelungState state = make_state(initial);

    for (std::size_t step = 1; step <= steps; ++step) {
        try {
            state = madelung_step(state, v, dt);
        } catch (const NodeError& e) {
            report.completed = false;
            report.note = e.what();
            return report;
        } catch (const NumericError& e) {
            // Blow-up on the way to node formation: same physical diagnosis.
            report.completed = false;
            report.note = e.what();
            return report;
        }
        for (std::size_t i = 0; i < n; ++i) psi[i] *= half_v[i];
        sp.forward(psi.data(), hat.data());
        for (std::size_t i = 0; i < n; ++i) hat[i] *= kinetic[i];
        sp.inverse(hat.data(), psi.data());
        for (std::size_t i = 0; i < n; ++i) psi[i] *= half_v[i];

        // Reference rho and J from the wavefunction.
        sp.forward(psi.data(), hat.data());
        for (std::size_t i = 0; i < n; ++i) hat[i] *= cdouble(0.0, k[i]);
        hat[n / 2] = 0.0;
        sp.inverse(hat.data(), dpsi.data());
        double rho_diff = 0.0, j_diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double rho_ref = std::norm(psi[i]);
            const double j_ref = std::imag(std::conj(psi[i]) * dpsi[i]);
            rho_diff = std::max(rho_diff, std::abs(state.hydro.rho[i] - rho_ref));
            j_diff = std::max(j_diff, std::abs(state.hydro.current[i] - j_ref));
        }
        report.time.push_back(static_cast<double>(step) * dt);
        report.sup_rho_diff.push_back(rho_diff);
        report.sup_current_diff.push_back(j_diff);
    }
    report.completed = true;
    report.note = "both integrators reached t_final";
    return report;
}

}  // namespace qhlab
