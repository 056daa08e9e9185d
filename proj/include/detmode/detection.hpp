#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaussian_state.hpp"
#include "mode_basis.hpp"
#include "pixel_layout.hpp"
#include "state_analysis.hpp"

namespace detmode {

/// Fraction of the peak gain squared below which the gain-weighted beam
/// norm f^2 counts as vanishing and the measurement as degenerate.
inline constexpr double kDetectionDegenerateTol = 1e-15;

/// Default tolerance on |sum_j gain_j * integral_j| / max |gain| for
/// classifying a measurement as a balanced difference.
inline constexpr double kDifferenceTol = 1e-9;

/// The single transverse mode a gained pixel detector actually measures.
struct DetectionMode {
    /// w1 = gain(r) v0(r) / f, normalized on the grid.
    SampledMode w1;
    /// Normalization f with f^2 = sum_j gain_j^2 int_{D_j} |v0|^2; the
    /// shot-noise variance of the measurement is f^2 N0.
    double f = 0.0;
    /// True when the gains balance the mean signal away,
    /// sum_j gain_j int_{D_j} |v0|^2 = 0 within tolerance.
    bool is_difference = false;
};

/// Detection mode of a normalized beam profile under a pixel layout.
/// All gains zero on the beam's support leave nothing to measure and
/// are rejected as degenerate.
inline DetectionMode detection_mode(const SampledMode& v0, const PixelLayout& layout,
                                    double difference_tol = kDifferenceTol) {
    if (!(v0.grid == layout.grid))
        throw shape_error("detection_mode: mode and layout grids differ");
    const double gain_peak = layout.gains.cwiseAbs().maxCoeff();
    if (gain_peak <= 0.0)
        throw degenerate_error("detection_mode: all gains are zero");

    Eigen::VectorXcd weighted(v0.amp.size());
    for (int cell = 0; cell < v0.grid.cells(); ++cell)
        weighted[cell] = layout.gain_at_cell(cell) * v0.amp[cell];
    const double f2 = weighted.squaredNorm() * v0.grid.cell_area();
    if (f2 <= kDetectionDegenerateTol * gain_peak * gain_peak)
        throw degenerate_error("detection_mode: gains vanish on the beam support");

    DetectionMode dm;
    dm.f = std::sqrt(f2);
    dm.w1 = SampledMode(v0.grid, weighted / dm.f);

    // Relative to min(peak gain, f) so the flag is gain-scale invariant
    // and implies |<w1, v0>| = |sum_j gain_j integral_j| / f <= tol.
    const Eigen::VectorXd integrals = pixel_integrals(v0, layout);
    dm.is_difference = std::abs(layout.gains.dot(integrals)) <=
                       difference_tol * std::min(gain_peak, dm.f);
    return dm;
}

/// Coupling of each basis mode to the measurement,
/// C_i = sum_j gain_j int_{D_j} u_i^* A, with A = sqrt(N0) v0 the mean
/// field. On the grid this is exactly sqrt(N0) f <u_i, w1>. Over any
/// basis containing w1 in its span, sum |C_i|^2 = N0 f^2.
inline Eigen::VectorXcd overlap_coefficients(const GaussianState& s,
                                             const ModeBasis& basis,
                                             const PixelLayout& layout) {
    auto [v0, n0] = mean_field_mode(s, basis);
    DetectionMode dm = detection_mode(v0, layout);
    const double scale = std::sqrt(n0) * dm.f;
    Eigen::VectorXcd c(basis.size());
    for (int i = 0; i < basis.size(); ++i)
        c[i] = scale * overlap(basis[i], dm.w1);
    return c;
}

/// Everything a single gained-pixel measurement yields.
struct MeasurementReport {
    double mean = 0.0;
    double variance = 0.0;
    /// Variance of the same measurement on a coherent state of the same
    /// mean field, f^2 N0.
    double shot_noise = 0.0;
    /// variance / shot_noise; below 1 means sub-shot-noise.
    double sql_ratio = 0.0;
    DetectionMode detection_mode;
    /// Linearization drops terms of relative order 1/N0; flag weak beams.
    bool small_photon_warning = false;
};

namespace detail {

/// Mean signal and shot noise shared by both variance paths.
inline void fill_report_common(MeasurementReport& rep, const SampledMode& v0,
                               double n0, const PixelLayout& layout) {
    const Eigen::VectorXd integrals = pixel_integrals(v0, layout);
    rep.mean = n0 * layout.gains.dot(integrals);
    rep.shot_noise = rep.detection_mode.f * rep.detection_mode.f * n0;
    rep.small_photon_warning = n0 < 100.0;
}

} // namespace detail

/// Variance of the gained-pixel photon number measurement, computed
/// directly in the given basis. With C the overlap coefficients and
/// dN = sum_i (C_i da_i^dag + conj(C_i) da_i), the variance splits into
/// the shot-noise term f^2 N0 (the full-space vacuum contribution,
/// independent of basis truncation) plus the normally ordered correlator
/// sum 2 Re sum_ij [ conj(<da_i da_j>) C_i C_j + <da_i^dag da_j> C_i conj(C_j) ].
inline MeasurementReport variance_direct(const GaussianState& s, const ModeBasis& basis,
                                         const PixelLayout& layout) {
    auto [v0, n0] = mean_field_mode(s, basis);
    MeasurementReport rep;
    rep.detection_mode = detection_mode(v0, layout);
    detail::fill_report_common(rep, v0, n0, layout);

    const double scale = std::sqrt(n0) * rep.detection_mode.f;
    Eigen::VectorXcd c(basis.size());
    for (int i = 0; i < basis.size(); ++i)
        c[i] = scale * overlap(basis[i], rep.detection_mode.w1);

    const FluctuationMoments fm = fluctuation_moments(s);
    // 2 Re [ C^T conj(anomalous) C + C^dag photon^T C ], accumulated as
    // one complex number.
    const cplx anomalous_part = (c.transpose() * fm.anomalous.conjugate() * c)(0, 0);
    const cplx photon_part = (c.adjoint() * fm.photon.transpose() * c)(0, 0);
    rep.variance = rep.shot_noise + 2.0 * (anomalous_part + photon_part).real();
    rep.sql_ratio = rep.variance / rep.shot_noise;
    return rep;
}

/// The basis change behind variance_via_detection_mode, exposed so its
/// geometry can be inspected: the first working modes are the projected
/// mean-field remainder w0 (when it exists) and the detection mode w1;
/// the rest completes the span of the input basis plus w1.
struct DetectionBasis {
    ModeBasis basis;
    int w1_index = 0;
    /// The input state padded with vacuum for any direction of w1
    /// outside the input span, still in input-basis labeling.
    GaussianState embedded_state;
    /// Operator relabeling from the embedding to `basis`.
    Eigen::MatrixXcd unitary;
    /// The state expressed in `basis`.
    GaussianState transformed;
    DetectionMode detection_mode;
    double n0 = 0.0;
};

inline DetectionBasis build_detection_basis(const GaussianState& s,
                                            const ModeBasis& basis,
                                            const PixelLayout& layout) {
    DetectionBasis db;
    auto [v0, n0] = mean_field_mode(s, basis);
    db.n0 = n0;
    db.detection_mode = detection_mode(v0, layout);
    const SampledMode& w1 = db.detection_mode.w1;

    // Embed: if w1 leaves the input span, adjoin its residual direction
    // as one extra vacuum mode. Components below 1e-8 contribute less
    // than 1e-16 of the shot noise and are dropped.
    std::vector<SampledMode> embedding = basis.modes;
    SampledMode w1_res = w1;
    detail::project_out(embedding, w1_res);
    const double res = w1_res.norm();
    Eigen::VectorXcd mean = s.mean;
    Eigen::MatrixXd cov = s.cov;
    if (res > 1e-8) {
        w1_res.amp /= res;
        embedding.push_back(std::move(w1_res));
        const int m = static_cast<int>(embedding.size());
        mean.conservativeResize(m);
        mean[m - 1] = cplx(0.0);
        Eigen::MatrixXd grown = Eigen::MatrixXd::Identity(2 * m, 2 * m);
        grown.topLeftCorner(2 * m - 2, 2 * m - 2) = cov;
        cov = std::move(grown);
    }
    db.embedded_state = GaussianState(std::move(mean), std::move(cov));

    // Working modes: w0 = normalized remainder of v0 off w1, then w1.
    // For a balanced difference w0 is v0 itself; when the gains are all
    // equal w1 coincides with v0 and w0 disappears.
    std::vector<SampledMode> seeds;
    SampledMode w0 = v0;
    // Two passes: with near-uniform gains w1 is almost v0 itself and the
    // remainder is tiny, so the rounding left by one projection would
    // dominate it after normalization.
    for (int pass = 0; pass < 2; ++pass)
        w0.amp -= overlap(w1, w0) * w1.amp;
    const double w0_norm = w0.norm();
    if (w0_norm > 1e-8) {
        w0.amp /= w0_norm;
        seeds.push_back(std::move(w0));
    }
    seeds.push_back(w1);
    db.w1_index = static_cast<int>(seeds.size()) - 1;

    ModeBasis pool;
    pool.modes = std::move(embedding);
    pool.ortho_tol = std::max(basis.ortho_tol, kGramSchmidtDropTol);
    ModeBasis partial(std::move(seeds), 1e-10);
    db.basis = complete_basis(partial, pool);

    const int m = db.basis.size();
    Eigen::MatrixXcd u(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            u(i, j) = overlap(db.basis[i], pool.modes[static_cast<size_t>(j)]);
    db.unitary = u;
    const double unit_tol = std::max(1e-8, 3.0 * basis.ortho_tol);
    db.transformed = basis_change(db.embedded_state, u, unit_tol);
    return db;
}

/// Variance of the same measurement computed the long way around: rotate
/// the state into a basis whose mode w1_index is the detection mode and
/// read off f^2 N0 times the X-quadrature variance of that mode. Agrees
/// with variance_direct to rounding when the basis is grid-orthonormal;
/// the agreement is the library's core cross-check.
inline MeasurementReport variance_via_detection_mode(const GaussianState& s,
                                                     const ModeBasis& basis,
                                                     const PixelLayout& layout) {
    DetectionBasis db = build_detection_basis(s, basis, layout);
    MeasurementReport rep;
    rep.detection_mode = db.detection_mode;
    auto [v0, n0] = mean_field_mode(s, basis);
    detail::fill_report_common(rep, v0, n0, layout);
    const double var_x = db.transformed.cov(2 * db.w1_index, 2 * db.w1_index);
    rep.variance = rep.shot_noise * var_x;
    rep.sql_ratio = var_x;
    return rep;
}

/// Both variance paths side by side.
struct MeasurementCrossCheck {
    MeasurementReport direct;
    MeasurementReport via_detection_mode;
    double relative_discrepancy = 0.0;

    bool agrees(double rel_tol) const { return relative_discrepancy <= rel_tol; }
};

/// Runs both variance computations and quantifies their disagreement
/// relative to the larger of the two variances and the shot noise.
inline MeasurementCrossCheck analyze_measurement(const GaussianState& s,
                                                 const ModeBasis& basis,
                                                 const PixelLayout& layout) {
    MeasurementCrossCheck cc;
    cc.direct = variance_direct(s, basis, layout);
    cc.via_detection_mode = variance_via_detection_mode(s, basis, layout);
    const double scale = std::max({std::abs(cc.direct.variance),
                                   std::abs(cc.via_detection_mode.variance),
                                   cc.direct.shot_noise});
    cc.relative_discrepancy =
        scale > 0.0 ? std::abs(cc.direct.variance - cc.via_detection_mode.variance) / scale
                    : 0.0;
    return cc;
}

} // namespace detmode
