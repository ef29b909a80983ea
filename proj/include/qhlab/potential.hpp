#pragma once

#include <vector>

#include "qhlab/grid.hpp"

namespace qhlab {

// External potential sampled on a grid. kappa is meaningful only for the
// harmonic kind (V = kappa x^2).
struct Potential1D {
    enum class Kind { free_space, harmonic, custom };
    Kind kind = Kind::free_space;
    double kappa = 0.0;
    std::vector<double> values;

    static Potential1D free_space(const Grid1D& grid);
    static Potential1D harmonic(const Grid1D& grid, double kappa);
    static Potential1D custom(const Grid1D& grid, std::vector<double> values);
};

}  // namespace qhlab
