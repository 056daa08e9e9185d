#pragma once

#include <cmath>

#include "errors.hpp"

namespace detmode {

/// Uniform rectangular sampling window centred on the optical axis.
///
/// Cell centres tile the window exactly: x_i = -width_x/2 + (i + 1/2) dx.
/// All integrals over the transverse plane are midpoint Riemann sums,
/// sum over cells of (integrand at centre) * cell_area().
struct Grid {
    int nx = 0;
    int ny = 0;
    double width_x = 0.0;
    double width_y = 0.0;

    Grid() = default;

    Grid(int nx_, int ny_, double width_x_, double width_y_)
        : nx(nx_), ny(ny_), width_x(width_x_), width_y(width_y_) {
        if (nx < 2 || ny < 2)
            throw shape_error("Grid: nx and ny must both be >= 2");
        if (!std::isfinite(width_x) || !std::isfinite(width_y) ||
            width_x <= 0.0 || width_y <= 0.0)
            throw shape_error("Grid: window extents must be positive and finite");
    }

    int cells() const { return nx * ny; }
    double dx() const { return width_x / nx; }
    double dy() const { return width_y / ny; }
    double cell_area() const { return dx() * dy(); }

    double x_center(int ix) const { return -0.5 * width_x + (ix + 0.5) * dx(); }
    double y_center(int iy) const { return -0.5 * width_y + (iy + 0.5) * dy(); }

    /// Row-major storage, x fastest.
    int index(int ix, int iy) const { return iy * nx + ix; }

    friend bool operator==(const Grid&, const Grid&) = default;
};

} // namespace detmode
