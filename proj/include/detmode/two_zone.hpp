#pragma once

#include <cmath>
#include <string>

#include "detection.hpp"
#include "gaussian_state.hpp"
#include "pixel_layout.hpp"

namespace detmode {

/// Geometry of a two-pixel +1/-1 measurement on a beam v0: the partial
/// beam energies i+ and i- on the two pixels decompose the flipped mode
/// as w1 = alpha v0 + beta v1, with v1 the flipped copy of the
/// complementary mode w0.
struct TwoZoneDecomposition {
    double i_plus = 0.0;
    double i_minus = 0.0;
    /// alpha = i+ - i-, the projection <w1, v0> for real beams.
    double alpha = 0.0;
    /// beta = 2 sqrt(i+ i-).
    double beta = 0.0;
    SampledMode v0;
    /// w0 = sqrt(i-/i+) v0 on the + pixel, sqrt(i+/i-) v0 on the - pixel.
    SampledMode w0;
    /// v1 = flipped w0, orthogonal to v0.
    SampledMode v1;
    /// w1 = flipped v0 (the detection mode; f = 1 for unit gains).
    SampledMode w1;
};

/// Splits a normalized beam over a two-pixel +1/-1 layout into the
/// appendix geometry above. Both pixels must catch some light, else w0
/// is undefined. The reconstruction w1 = alpha v0 + beta v1 is verified
/// cellwise before returning.
inline TwoZoneDecomposition two_zone_decomposition(const SampledMode& v0,
                                                   const PixelLayout& layout) {
    if (!(v0.grid == layout.grid))
        throw shape_error("two_zone_decomposition: mode and layout grids differ");
    if (layout.pixel_count() != 2)
        throw shape_error("two_zone_decomposition: layout must have exactly two pixels");
    const double g0 = layout.gains[0], g1 = layout.gains[1];
    const bool plus_first = std::abs(g0 - 1.0) <= 1e-12 && std::abs(g1 + 1.0) <= 1e-12;
    const bool minus_first = std::abs(g0 + 1.0) <= 1e-12 && std::abs(g1 - 1.0) <= 1e-12;
    if (!plus_first && !minus_first)
        throw shape_error("two_zone_decomposition: gains must be +1 and -1");
    const int plus_pixel = plus_first ? 0 : 1;

    const Eigen::VectorXd integrals = pixel_integrals(v0, layout);
    TwoZoneDecomposition d;
    d.i_plus = integrals[plus_pixel];
    d.i_minus = integrals[1 - plus_pixel];
    if (d.i_plus <= 1e-12 || d.i_minus <= 1e-12)
        throw degenerate_error("two_zone_decomposition: a pixel catches no light, "
                               "i+ = " + std::to_string(d.i_plus) +
                               ", i- = " + std::to_string(d.i_minus));
    d.alpha = d.i_plus - d.i_minus;
    d.beta = 2.0 * std::sqrt(d.i_plus * d.i_minus);

    d.v0 = v0;
    d.w0 = SampledMode::zero(v0.grid);
    d.w1 = SampledMode::zero(v0.grid);
    const double scale_plus = std::sqrt(d.i_minus / d.i_plus);
    const double scale_minus = std::sqrt(d.i_plus / d.i_minus);
    for (int cell = 0; cell < v0.grid.cells(); ++cell) {
        const bool on_plus = layout.pixel_of_cell[static_cast<size_t>(cell)] == plus_pixel;
        d.w0.amp[cell] = (on_plus ? scale_plus : scale_minus) * v0.amp[cell];
        d.w1.amp[cell] = (on_plus ? 1.0 : -1.0) * v0.amp[cell];
    }
    d.v1 = SampledMode::zero(v0.grid);
    for (int cell = 0; cell < v0.grid.cells(); ++cell) {
        const bool on_plus = layout.pixel_of_cell[static_cast<size_t>(cell)] == plus_pixel;
        d.v1.amp[cell] = (on_plus ? 1.0 : -1.0) * d.w0.amp[cell];
    }

    // i+ + i- = 1 for a normalized beam makes the reconstruction exact
    // cell by cell; verify it really is.
    double worst = 0.0, peak = 0.0;
    for (int cell = 0; cell < v0.grid.cells(); ++cell) {
        const cplx recon = d.alpha * d.v0.amp[cell] + d.beta * d.v1.amp[cell];
        worst = std::max(worst, std::abs(recon - d.w1.amp[cell]));
        peak = std::max(peak, std::abs(v0.amp[cell]));
    }
    if (worst > 1e-10 * std::max(peak, 1.0))
        throw crosscheck_error("two_zone_decomposition: w1 reconstruction off by " +
                               std::to_string(worst) + " (beam not normalized?)");
    return d;
}

/// Measurement variance assembled from the two-zone geometry and the
/// state's first two modes: f^2 N0 (alpha^2 Var X0 + beta^2 Var X1 +
/// 2 alpha beta Cov(X0, X1)). The state must be in the eigenbasis whose
/// first two modes are v0 and v1.
inline double two_zone_variance_decomposition(const GaussianState& s,
                                              const TwoZoneDecomposition& d) {
    if (s.dim() < 2)
        throw shape_error("two_zone_variance_decomposition: state needs at least 2 modes");
    const double n0 = s.mean_photons();
    if (n0 <= 0.0)
        throw degenerate_error("two_zone_variance_decomposition: zero mean field");
    // Eigenbasis form: all mean amplitude in mode 0.
    const double off_mean = std::sqrt(std::max(0.0, n0 - std::norm(s.mean[0])));
    if (off_mean > 1e-6 * std::sqrt(n0))
        throw shape_error("two_zone_variance_decomposition: state mean is not "
                          "concentrated in the first mode");
    const double f2 = d.i_plus + d.i_minus; // = f^2 for unit gains
    const double var_x0 = s.cov(0, 0);
    const double var_x1 = s.cov(2, 2);
    const double cov_x0x1 = s.cov(0, 2);
    return f2 * n0 *
           (d.alpha * d.alpha * var_x0 + d.beta * d.beta * var_x1 +
            2.0 * d.alpha * d.beta * cov_x0x1);
}

} // namespace detmode
