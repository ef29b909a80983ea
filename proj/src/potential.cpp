#include "qhlab/potential.hpp"

#include <cmath>

#include "qhlab/errors.hpp"

namespace qhlab {

Potential1D Potential1D::free_space(const Grid1D& grid) {
    Potential1D v;
    v.kind = Kind::free_space;
    v.values.assign(grid.n, 0.0);
    return v;
}

Potential1D Potential1D::harmonic(const Grid1D& grid, double kappa) {
    if (!std::isfinite(kappa)) throw ConfigError("harmonic potential: kappa must be finite");
    Potential1D v;
    v.kind = Kind::harmonic;
    v.kappa = kappa;
    v.values.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        v.values[i] = kappa * x * x;
    }
    return v;
}

Potential1D Potential1D::custom(const Grid1D& grid, std::vector<double> values) {
    if (values.size() != grid.n)
        throw ConfigError("custom potential: sample count does not match the grid");
    for (double val : values)
        if (!std::isfinite(val)) throw ConfigError("custom potential: samples must be finite");
    Potential1D v;
    v.kind = Kind::custom;
    v.values = std::move(values);
    return v;
}

}  // namespace qhlab
