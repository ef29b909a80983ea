#include "qhlab/instability.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <string>
#include <thread>

#include "qhlab/errors.hpp"

namespace qhlab {

namespace {

// Trapezoid weights over the snapped interval: dx at interior nodes, dx/2 at
// the two endpoints.
double trapezoid(const std::vector<double>& f, const ProbeInterval& iv, double dx) {
    double acc = 0.5 * (f[iv.i_lo] + f[iv.i_hi]);
    for (std::size_t i = iv.i_lo + 1; i < iv.i_hi; ++i) acc += f[i];
    return acc * dx;
}

void require_no_node(const HydroField& h, const ProbeInterval& iv) {
    for (std::size_t i = iv.i_lo; i <= iv.i_hi; ++i)
        if (!(h.rho[i] > kRhoFloor))
            throw NodeError("phase probe: density vanishes at x = " +
                            std::to_string(h.grid.x(i)) + " inside the probe interval");
}

// Wrapped phase of the two-packet state at x: the left packet's amplitude is
// factored out, leaving atan2(sin(p0 x), A + cos(p0 x)) with the amplitude
// ratio A = exp(-L x / (2 sigma^2)).
double wrapped_pair_phase(double x, const GaussianPairParams& p) {
    const double a_ratio = std::exp(-p.L * x / (2.0 * p.sigma * p.sigma));
    return std::atan2(std::sin(p.p0 * x), a_ratio + std::cos(p.p0 * x));
}

double wrap_to_pi(double d) {
    return std::remainder(d, 2.0 * std::numbers::pi);
}

}  // namespace

ProbeInterval probe_interval(const Grid1D& grid, double ell) {
    if (!(ell > 0.0)) throw ConfigError("probe_interval: ell must be positive");
    double snap_lo = 0.0, snap_hi = 0.0;
    ProbeInterval iv;
    iv.i_lo = grid.index_near(-ell, &snap_lo);
    iv.i_hi = grid.index_near(ell, &snap_hi);
    iv.snap_distance = std::max(snap_lo, snap_hi);
    if (iv.i_lo >= iv.i_hi)
        throw ConfigError("probe_interval: interval [-ell, ell] snaps to fewer than two points");
    return iv;
}

double phase_difference(const HydroField& h, double ell) {
    const ProbeInterval iv = probe_interval(h.grid, ell);
    require_no_node(h, iv);
    std::vector<double> integrand(h.grid.n, 0.0);
    for (std::size_t i = iv.i_lo; i <= iv.i_hi; ++i) integrand[i] = h.current[i] / h.rho[i];
    return trapezoid(integrand, iv, h.grid.dx);
}

HydroField perturb_current(const HydroField& h, double eps) {
    if (!std::isfinite(eps)) throw ConfigError("perturb_current: eps must be finite");
    HydroField out = h;
    for (double& j : out.current) j += eps;
    return out;
}

double perturbed_phase_shift(const HydroField& h, double ell, double eps) {
    const ProbeInterval iv = probe_interval(h.grid, ell);
    require_no_node(h, iv);
    std::vector<double> integrand(h.grid.n, 0.0);
    for (std::size_t i = iv.i_lo; i <= iv.i_hi; ++i) integrand[i] = 1.0 / h.rho[i];
    return eps * trapezoid(integrand, iv, h.grid.dx);
}

double phase_shift_identity_residual(const HydroField& h, double ell, double eps) {
    const ProbeInterval iv = probe_interval(h.grid, ell);
    require_no_node(h, iv);
    // Per node, (J+eps)/rho - J/rho - eps/rho is a pure rounding defect; the
    // extended-precision fused evaluation keeps the sum at that scale instead
    // of the ~eps/rho scale of each quotient.
    long double acc = 0.0L;
    for (std::size_t i = iv.i_lo; i <= iv.i_hi; ++i) {
        const long double rho = h.rho[i];
        const long double j = h.current[i];
        const long double e = eps;
        const long double defect = (j + e) / rho - j / rho - e / rho;
        const long double w = (i == iv.i_lo || i == iv.i_hi) ? 0.5L : 1.0L;
        acc += w * defect;
    }
    acc *= static_cast<long double>(h.grid.dx);
    return std::abs(static_cast<double>(acc));
}

double predicted_shift(double ell, double eps, int n_exponent) {
    if (ell == 0.0) return 0.0;
    if (!(ell > 0.0)) throw ConfigError("predicted_shift: ell must be non-negative");
    if (!(eps > 0.0)) throw ConfigError("predicted_shift: eps must be positive");
    if (n_exponent < 2) throw ConfigError("predicted_shift: exponent must be >= 2");
    return 2.0 * ell / std::pow(eps, n_exponent - 1);
}

double general_perturbed_phase(const HydroField& h, double ell, double eps, int n_exponent) {
    const ProbeInterval iv = probe_interval(h.grid, ell);
    std::vector<double> current(h.grid.n, 0.0);
    for (std::size_t i = iv.i_lo; i <= iv.i_hi; ++i) current[i] = h.current[i];
    const double j_integral = trapezoid(current, iv, h.grid.dx);
    return j_integral / std::pow(eps, n_exponent) + predicted_shift(ell, eps, n_exponent);
}

double analytic_pair_phase(double x, const GaussianPairParams& p) {
    if (!(p.sigma > 0.0) || !(p.L > 0.0))
        throw ConfigError("analytic_pair_phase: need positive sigma and L");
    // Anchor deep in the left packet's dominance region, where the amplitude
    // ratio dwarfs the oscillation and the wrapped value is the true phase.
    const double anchor = -(p.L + 10.0 * p.sigma);
    if (x <= anchor) return wrapped_pair_phase(x, p);
    // Walk from the anchor in steps small enough that the true phase moves
    // by well under pi per step, so wrapped increments unwrap exactly.
    const double rate_bound = std::abs(p.p0) + p.L / (2.0 * p.sigma * p.sigma) + 1.0;
    const double step = 0.5 / rate_bound;
    const auto legs = static_cast<std::size_t>(std::ceil((x - anchor) / step));
    double phase = wrapped_pair_phase(anchor, p);
    double prev_wrapped = phase;
    for (std::size_t i = 1; i <= legs; ++i) {
        const double xi = (i == legs) ? x : anchor + (x - anchor) * static_cast<double>(i) /
                                                        static_cast<double>(legs);
        const double wrapped = wrapped_pair_phase(xi, p);
        phase += wrap_to_pi(wrapped - prev_wrapped);
        prev_wrapped = wrapped;
    }
    return phase;
}

std::vector<double> analytic_pair_phase_profile(const Grid1D& grid,
                                                const GaussianPairParams& p) {
    std::vector<double> out(grid.n);
    out[0] = analytic_pair_phase(grid.x(0), p);
    double prev_wrapped = wrapped_pair_phase(grid.x(0), p);
    for (std::size_t i = 1; i < grid.n; ++i) {
        const double wrapped = wrapped_pair_phase(grid.x(i), p);
        out[i] = out[i - 1] + wrap_to_pi(wrapped - prev_wrapped);
        prev_wrapped = wrapped;
    }
    return out;
}

HydroField plateau_profile(double eps, int n_exponent, double ell, const Grid1D& grid,
                           double shoulder_width) {
    if (!(eps > 0.0)) throw ConfigError("plateau_profile: eps must be positive");
    if (n_exponent < 2) throw ConfigError("plateau_profile: exponent must be >= 2");
    if (!(ell > 0.0)) throw ConfigError("plateau_profile: ell must be positive");
    if (!(shoulder_width > 0.0)) throw ConfigError("plateau_profile: shoulder width must be positive");
    if (grid.x_min > -(ell + 3.0 * shoulder_width) || grid.x_max < ell + 3.0 * shoulder_width)
        throw ConfigError("plateau_profile: box too small for the plateau plus shoulders");
    const double level = std::pow(eps, n_exponent);
    const double box = grid.length();
    if (!(level * box < 1.0))
        throw ConfigError("plateau_profile: plateau level alone exceeds unit mass; enlarge eps^N");

    HydroField h;
    h.grid = grid;
    h.current.assign(grid.n, 0.0);
    h.rho.resize(grid.n);
    std::vector<double> shoulder(grid.n);
    double shoulder_mass = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double u = std::max(std::abs(grid.x(i)) - ell, 0.0);
        shoulder[i] = u * u * std::exp(-u * u / (2.0 * shoulder_width * shoulder_width));
        shoulder_mass += shoulder[i];
    }
    shoulder_mass *= grid.dx;
    const double amplitude = (1.0 - level * box) / shoulder_mass;
    for (std::size_t i = 0; i < grid.n; ++i) h.rho[i] = level + amplitude * shoulder[i];
    h.is_normalized = true;
    return h;
}

double calibrate_separation(double eps, int n_exponent, double sigma, double ell, double p0) {
    if (!(eps > 0.0)) throw ConfigError("calibrate_separation: eps must be positive");
    if (n_exponent < 2) throw ConfigError("calibrate_separation: exponent must be >= 2");
    if (!(sigma > 0.0) || !(ell > 0.0))
        throw ConfigError("calibrate_separation: need positive sigma and ell");
    if (!(eps < ell / (2.0 * sigma)))
        throw ConfigError("calibrate_separation: eps must stay below ell/(2 sigma)");

    const double target = std::pow(eps, n_exponent);
    const auto midpoint_density = [&](double l) {
        const double q = std::exp(-l * l / (4.0 * sigma * sigma) - p0 * p0 * sigma * sigma);
        return std::exp(-l * l / (4.0 * sigma * sigma)) /
               (sigma * std::sqrt(std::numbers::pi) * (1.0 + q));
    };

    double lo = 5.0 * sigma;  // the closest legal separation (sigma <= L/5)
    if (midpoint_density(lo) <= target)
        throw CalibrationError(
            "calibrate_separation: requested midpoint density is above what the closest legal "
            "separation produces");
    double hi = 2.0 * lo;
    while (midpoint_density(hi) > target) {
        hi *= 2.0;
        if (hi > 1e8 * sigma)
            throw CalibrationError("calibrate_separation: target not reachable by separation");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (midpoint_density(mid) > target)
            lo = mid;
        else
            hi = mid;
        if ((hi - lo) < 1e-15 * hi) break;
    }
    const double l_star = 0.5 * (lo + hi);
    if (std::abs(midpoint_density(l_star) - target) > 1e-12 * target)
        throw CalibrationError("calibrate_separation: bisection failed to meet 1e-12 relative");
    return l_star;
}

SweepResult epsilon_sweep(const InstabilityConfig& cfg, const Grid1D& grid, unsigned threads) {
    if (cfg.epsilons.empty()) throw ConfigError("epsilon_sweep: need at least one eps");
    for (double e : cfg.epsilons)
        if (!(e > 0.0) || !std::isfinite(e))
            throw ConfigError("epsilon_sweep: every eps must be positive and finite");
    if (cfg.n_exponent < 2) throw ConfigError("epsilon_sweep: exponent must be >= 2 (the law needs N > 1)");
    if (!(cfg.ell > 0.0)) throw ConfigError("epsilon_sweep: ell must be positive");
    if (cfg.profile == InstabilityConfig::Profile::calibrated_pair) {
        if (!(cfg.sigma > 0.0)) throw ConfigError("epsilon_sweep: sigma must be positive");
        for (double e : cfg.epsilons)
            if (!(e < cfg.ell / (2.0 * cfg.sigma)))
                throw ConfigError("epsilon_sweep: eps must stay below ell/(2 sigma) for the pair");
    }

    std::vector<double> eps_sorted = cfg.epsilons;
    std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<>());

    SweepResult result;
    result.rows.resize(eps_sorted.size());
    std::vector<std::exception_ptr> failures(eps_sorted.size());

    const auto evaluate_row = [&](std::size_t idx) {
        const double eps = eps_sorted[idx];
        HydroField h;
        if (cfg.profile == InstabilityConfig::Profile::plateau) {
            h = plateau_profile(eps, cfg.n_exponent, cfg.ell, grid, cfg.shoulder_width);
        } else {
            GaussianPairParams p;
            p.L = calibrate_separation(eps, cfg.n_exponent, cfg.sigma, cfg.ell, cfg.p0);
            p.sigma = cfg.sigma;
            p.p0 = cfg.p0;
            h = to_hydro(gaussian_pair(p, grid));
        }
        SweepRow row;
        row.epsilon = eps;
        row.s_base = phase_difference(h, cfg.ell);
        row.s_perturbed = phase_difference(perturb_current(h, eps), cfg.ell);
        row.delta_s_exact = row.s_perturbed - row.s_base;
        row.delta_s_predicted = predicted_shift(cfg.ell, eps, cfg.n_exponent);
        row.rel_err = std::abs(row.delta_s_exact - row.delta_s_predicted) /
                      std::abs(row.delta_s_predicted);
        result.rows[idx] = row;
    };

    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(threads, eps_sorted.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < eps_sorted.size(); ++i) {
            try {
                evaluate_row(i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < eps_sorted.size(); i += workers) {
                    try {
                        evaluate_row(i);
                    } catch (...) {
                        failures[i] = std::current_exception();
                    }
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& ep : failures)
        if (ep) std::rethrow_exception(ep);

    result.n_points = result.rows.size();
    const double span = eps_sorted.front() / eps_sorted.back();
    const bool distinct4 =
        std::adjacent_find(eps_sorted.begin(), eps_sorted.end()) == eps_sorted.end() &&
        eps_sorted.size() >= 4;
    result.fit_skipped = !distinct4 || span < 100.0 * (1.0 - 1e-12);
    if (!result.fit_skipped) {
        std::vector<double> lx, ly;
        lx.reserve(result.rows.size());
        ly.reserve(result.rows.size());
        for (const SweepRow& row : result.rows) {
            if (!(row.delta_s_exact > 0.0)) {
                result.fit_skipped = true;
                break;
            }
            lx.push_back(std::log(row.epsilon));
            ly.push_back(std::log(row.delta_s_exact));
        }
        if (!result.fit_skipped) result.fit = fit_line(lx, ly);
    }
    return result;
}

}  // namespace qhlab
