#include "qhlab/grid.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qhlab/errors.hpp"

namespace qhlab {

Grid1D Grid1D::build(double x_min, double x_max, std::size_t n) {
    if (!(x_max > x_min))
        throw ConfigError("grid: x_max must exceed x_min (got [" + std::to_string(x_min) +
                          ", " + std::to_string(x_max) + "])");
    if (n < 16 || !std::has_single_bit(n))
        throw ConfigError("grid: n must be a power of two >= 16 (got " + std::to_string(n) + ")");
    Grid1D g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.n = n;
    g.dx = (x_max - x_min) / static_cast<double>(n);
    return g;
}

std::vector<double> Grid1D::coordinates() const {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = x(i);
    return xs;
}

std::size_t Grid1D::index_near(double pos, double* snap_distance) const {
    if (!(pos >= x_min && pos < x_max + dx))
        throw ConfigError("grid: position " + std::to_string(pos) + " outside the box");
    double raw = (pos - x_min) / dx;
    long long i = std::llround(raw);
    if (i < 0) i = 0;
    if (i >= static_cast<long long>(n)) i = static_cast<long long>(n) - 1;
    if (snap_distance) *snap_distance = std::abs(x(static_cast<std::size_t>(i)) - pos);
    return static_cast<std::size_t>(i);
}

}  // namespace qhlab
