#pragma once

#include <string>
#include <utility>
#include <vector>

#include "detection.hpp"
#include "gaussian_state.hpp"
#include "mode_basis.hpp"
#include "pixel_layout.hpp"
#include "state_analysis.hpp"

namespace detmode {

/// A beam plus squeezing recipe that beats shot noise on several
/// simultaneous difference measurements at once.
struct MultiMeasurementPlan {
    /// Coherent mean field in mode 0 plus squeezed vacuum (angle 0) in
    /// each detection-subspace mode.
    GaussianState state;
    /// {v0, orthonormalized detection subspace, completion from pool}.
    ModeBasis basis;
    /// One report per requested layout, in input order.
    std::vector<MeasurementReport> reports;
    /// Dimension of the span of the detection modes; equals the layout
    /// count when they are independent.
    int subspace_rank = 0;
    /// True when some detection modes were linear combinations of the
    /// others; the independent subset still gets squeezed.
    bool dependent_layouts = false;
    /// degree of `state`, subspace_rank + 1.
    int degree = 0;
};

/// Builds the minimal squeezing plan for simultaneous difference
/// measurements of beam v0 under each layout: every detection mode must
/// be a balanced difference for v0; their span gets squeezed vacuum
/// (parameter r, X quadrature) mode by mode. For real mode functions
/// each sql_ratio comes out at e^{-2r} or better.
inline MultiMeasurementPlan multi_measurement_plan(const SampledMode& v0,
                                                   const std::vector<PixelLayout>& layouts,
                                                   double r, const ModeBasis& pool,
                                                   double n0 = 1e4,
                                                   double difference_tol = kDifferenceTol) {
    if (layouts.empty())
        throw shape_error("multi_measurement_plan: no layouts given");
    if (!(n0 > 0.0) || !std::isfinite(n0))
        throw degenerate_error("multi_measurement_plan: mean photon number must be positive");

    std::vector<SampledMode> raw;
    raw.push_back(v0);
    for (size_t k = 0; k < layouts.size(); ++k) {
        DetectionMode dm = detection_mode(v0, layouts[k], difference_tol);
        if (!dm.is_difference)
            throw degenerate_error("multi_measurement_plan: layout " + std::to_string(k) +
                                   " is not a difference measurement for this beam");
        raw.push_back(std::move(dm.w1));
    }

    // v0 enters the elimination first, so the subspace modes are the
    // parts of the detection modes orthogonal to the mean field. For
    // difference measurements that projection is already near-trivial.
    ModeBasis seeds = gram_schmidt(raw);
    MultiMeasurementPlan plan;
    plan.subspace_rank = seeds.size() - 1;
    plan.dependent_layouts = plan.subspace_rank < static_cast<int>(layouts.size());

    plan.basis = complete_basis(seeds, pool);
    const int dim = plan.basis.size();

    std::vector<SqueezerSpec> squeezers;
    for (int j = 1; j <= plan.subspace_rank; ++j)
        squeezers.push_back({j, r, 0.0});
    plan.state = make_state(dim, {{0, cplx(std::sqrt(n0), 0.0)}}, squeezers);
    plan.degree = degree(plan.state);

    plan.reports.reserve(layouts.size());
    for (const auto& layout : layouts)
        plan.reports.push_back(variance_direct(plan.state, plan.basis, layout));
    return plan;
}

} // namespace detmode
