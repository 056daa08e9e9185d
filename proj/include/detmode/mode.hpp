#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace detmode {

using cplx = std::complex<double>;

/// A transverse mode profile sampled at the cell centres of a Grid.
///
/// Amplitudes are stored row-major (x fastest), matching Grid::index.
/// A mode is normalized when sum |amp|^2 * cell_area == 1; nothing here
/// enforces that, construction sites normalize explicitly where needed.
struct SampledMode {
    Grid grid;
    Eigen::VectorXcd amp;

    SampledMode() = default;

    SampledMode(const Grid& g, Eigen::VectorXcd a) : grid(g), amp(std::move(a)) {
        if (amp.size() != grid.cells())
            throw shape_error("SampledMode: amplitude size does not match grid");
        if (!amp.allFinite())
            throw shape_error("SampledMode: non-finite amplitude");
    }

    static SampledMode zero(const Grid& g) {
        return SampledMode(g, Eigen::VectorXcd::Zero(g.cells()));
    }

    cplx& at(int ix, int iy) { return amp[grid.index(ix, iy)]; }
    cplx at(int ix, int iy) const { return amp[grid.index(ix, iy)]; }

    double squared_norm() const { return amp.squaredNorm() * grid.cell_area(); }
    double norm() const { return std::sqrt(squared_norm()); }

    SampledMode normalized() const {
        double n = norm();
        if (n <= 0.0)
            throw degenerate_error("SampledMode: cannot normalize a zero mode");
        return SampledMode(grid, amp / n);
    }
};

/// Grid inner product <u, v> = sum conj(u) v * cell_area, antilinear in u.
inline cplx overlap(const SampledMode& u, const SampledMode& v) {
    if (!(u.grid == v.grid))
        throw shape_error("overlap: modes sampled on different grids");
    // Eigen's dot conjugates its left argument.
    return u.amp.dot(v.amp) * u.grid.cell_area();
}

/// sum_i coeffs[i] * modes[i]. All modes must share a grid.
inline SampledMode linear_combination(const std::vector<SampledMode>& modes,
                                      const Eigen::VectorXcd& coeffs) {
    if (modes.empty())
        throw shape_error("linear_combination: no modes given");
    if (coeffs.size() != static_cast<Eigen::Index>(modes.size()))
        throw shape_error("linear_combination: coefficient count does not match mode count");
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(modes[0].grid.cells());
    for (size_t i = 0; i < modes.size(); ++i) {
        if (!(modes[i].grid == modes[0].grid))
            throw shape_error("linear_combination: modes sampled on different grids");
        acc += coeffs[static_cast<Eigen::Index>(i)] * modes[i].amp;
    }
    return SampledMode(modes[0].grid, std::move(acc));
}

} // namespace detmode
