#pragma once

#include <cstddef>
#include <vector>

namespace qhlab {

// Uniform periodic lattice on [x_min, x_max). Point i sits at x_min + i*dx,
// dx = (x_max - x_min)/n; x_max itself is the periodic image of x_min.
// n must be a power of two >= 16 (spectral steppers require it).
struct Grid1D {
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t n = 0;
    double dx = 0.0;

    static Grid1D build(double x_min, double x_max, std::size_t n);

    double x(std::size_t i) const { return x_min + dx * static_cast<double>(i); }
    double length() const { return x_max - x_min; }
    std::vector<double> coordinates() const;

    // Index of the grid point nearest to pos (pos must lie inside the box);
    // if snap_distance is non-null it receives |x(i) - pos|.
    std::size_t index_near(double pos, double* snap_distance = nullptr) const;

    bool operator==(const Grid1D& o) const {
        return x_min == o.x_min && x_max == o.x_max && n == o.n;
    }
};

inline Grid1D build_grid(double x_min, double x_max, std::size_t n) {
    return Grid1D::build(x_min, x_max, n);
}

}  // namespace qhlab
