#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "grid.hpp"
#include "io.hpp"
#include "mode.hpp"

namespace detmode {

/// Partition of the grid into detector pixels with one electronic gain
/// per pixel. Every cell belongs to exactly one pixel; dead regions are
/// modeled as a pixel with gain 0.
struct PixelLayout {
    Grid grid;
    std::vector<int> pixel_of_cell;
    Eigen::VectorXd gains;

    PixelLayout() = default;

    PixelLayout(const Grid& g, std::vector<int> labels, Eigen::VectorXd gains_)
        : grid(g), pixel_of_cell(std::move(labels)), gains(std::move(gains_)) {
        if (static_cast<int>(pixel_of_cell.size()) != grid.cells())
            throw shape_error("PixelLayout: one label per grid cell required");
        if (gains.size() < 1)
            throw shape_error("PixelLayout: at least one pixel required");
        if (!gains.allFinite())
            throw shape_error("PixelLayout: non-finite gain");
        for (int label : pixel_of_cell)
            if (label < 0 || label >= gains.size())
                throw shape_error("PixelLayout: cell label " + std::to_string(label) +
                                  " outside [0, " + std::to_string(gains.size()) + ")");
    }

    int pixel_count() const { return static_cast<int>(gains.size()); }

    double gain_at_cell(int cell) const {
        return gains[pixel_of_cell[static_cast<size_t>(cell)]];
    }
};

/// Same partition, different gains.
inline PixelLayout with_gains(const PixelLayout& layout, Eigen::VectorXd gains) {
    if (gains.size() != layout.gains.size())
        throw shape_error("with_gains: gain count does not match pixel count");
    return PixelLayout(layout.grid, layout.pixel_of_cell, std::move(gains));
}

/// Two pixels split at x = 0: pixel 0 is x < 0, pixel 1 is x >= 0.
inline PixelLayout half_x(const Grid& grid, Eigen::Vector2d gains) {
    std::vector<int> labels(static_cast<size_t>(grid.cells()));
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix)
            labels[static_cast<size_t>(grid.index(ix, iy))] = grid.x_center(ix) < 0.0 ? 0 : 1;
    return PixelLayout(grid, std::move(labels), gains);
}

/// Two pixels split at y = 0: pixel 0 is y < 0, pixel 1 is y >= 0.
inline PixelLayout half_y(const Grid& grid, Eigen::Vector2d gains) {
    std::vector<int> labels(static_cast<size_t>(grid.cells()));
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix)
            labels[static_cast<size_t>(grid.index(ix, iy))] = grid.y_center(iy) < 0.0 ? 0 : 1;
    return PixelLayout(grid, std::move(labels), gains);
}

/// Four pixels numbered by quadrant: 0 is x>=0, y>=0, then
/// counterclockwise (1: x<0, y>=0; 2: x<0, y<0; 3: x>=0, y<0).
inline PixelLayout quadrants(const Grid& grid, Eigen::Vector4d gains) {
    std::vector<int> labels(static_cast<size_t>(grid.cells()));
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix) {
            const bool right = grid.x_center(ix) >= 0.0;
            const bool top = grid.y_center(iy) >= 0.0;
            int quad = right ? (top ? 0 : 3) : (top ? 1 : 2);
            labels[static_cast<size_t>(grid.index(ix, iy))] = quad;
        }
    return PixelLayout(grid, std::move(labels), gains);
}

/// Three pixels by radius: 0 inside r1, 1 in the ring [r1, r2), 2
/// outside. Cells belong to the region of their centre.
inline PixelLayout annulus(const Grid& grid, double r1, double r2, Eigen::Vector3d gains) {
    if (!std::isfinite(r1) || !std::isfinite(r2) || r1 < 0.0 || r2 <= r1)
        throw shape_error("annulus: radii must satisfy 0 <= r1 < r2");
    std::vector<int> labels(static_cast<size_t>(grid.cells()));
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double r = std::hypot(grid.x_center(ix), grid.y_center(iy));
            labels[static_cast<size_t>(grid.index(ix, iy))] = r < r1 ? 0 : (r < r2 ? 1 : 2);
        }
    return PixelLayout(grid, std::move(labels), gains);
}

/// Pixel regions from a label image (for example a PGM mask): pixel k
/// collects the cells whose image value is k.
inline PixelLayout from_labels(const Grid& grid, const LabelImage& img,
                               Eigen::VectorXd gains) {
    if (img.nx != grid.nx || img.ny != grid.ny)
        throw shape_error("from_labels: image is " + std::to_string(img.nx) + "x" +
                          std::to_string(img.ny) + " but grid is " +
                          std::to_string(grid.nx) + "x" + std::to_string(grid.ny));
    std::vector<int> labels(img.labels.begin(), img.labels.end());
    return PixelLayout(grid, std::move(labels), std::move(gains));
}

/// Per-pixel intensity integrals of a profile, int_{D_j} |v|^2 dA. No
/// normalization is assumed; for a normalized profile they sum to 1.
inline Eigen::VectorXd pixel_integrals(const SampledMode& v, const PixelLayout& layout) {
    if (!(v.grid == layout.grid))
        throw shape_error("pixel_integrals: mode and layout grids differ");
    Eigen::VectorXd integrals = Eigen::VectorXd::Zero(layout.pixel_count());
    for (int cell = 0; cell < v.grid.cells(); ++cell)
        integrals[layout.pixel_of_cell[static_cast<size_t>(cell)]] += std::norm(v.amp[cell]);
    return integrals * v.grid.cell_area();
}

} // namespace detmode
