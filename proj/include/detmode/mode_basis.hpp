#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "mode.hpp"

namespace detmode {

/// Relative residual below which a Gram-Schmidt candidate counts as
/// linearly dependent on the vectors already accepted.
inline constexpr double kGramSchmidtDropTol = 1e-10;

struct BasisMetadata {
    /// Per-mode norm deficit 1 - |u|^2_grid of the analytically normalized
    /// profile before grid renormalization. Large values mean the window
    /// clips the mode or the sampling is too coarse.
    std::vector<double> norm_deficit;
    std::vector<std::string> warnings;
};

/// An ordered set of modes on a common grid, orthonormal to within
/// ortho_tol. The constructor checks the pairwise Gram deviations, so a
/// ModeBasis in hand always satisfies its own tolerance.
struct ModeBasis {
    std::vector<SampledMode> modes;
    double ortho_tol = kGramSchmidtDropTol;
    BasisMetadata metadata;

    ModeBasis() = default;

    ModeBasis(std::vector<SampledMode> m, double tol, BasisMetadata md = {})
        : modes(std::move(m)), ortho_tol(tol), metadata(std::move(md)) {
        validate();
    }

    int size() const { return static_cast<int>(modes.size()); }
    bool empty() const { return modes.empty(); }
    const SampledMode& operator[](int i) const { return modes[static_cast<size_t>(i)]; }

    const Grid& grid() const {
        if (modes.empty())
            throw shape_error("ModeBasis: empty basis has no grid");
        return modes.front().grid;
    }

    double max_ortho_deviation() const {
        double worst = 0.0;
        for (size_t i = 0; i < modes.size(); ++i) {
            for (size_t j = i; j < modes.size(); ++j) {
                cplx g = overlap(modes[i], modes[j]);
                double dev = std::abs(g - (i == j ? cplx(1.0) : cplx(0.0)));
                worst = std::max(worst, dev);
            }
        }
        return worst;
    }

    void validate() const {
        for (const auto& m : modes)
            if (!(m.grid == modes.front().grid))
                throw shape_error("ModeBasis: modes sampled on different grids");
        double dev = max_ortho_deviation();
        if (dev > ortho_tol)
            throw validation_error("ModeBasis: orthonormality deviation " +
                                   std::to_string(dev) + " exceeds tolerance " +
                                   std::to_string(ortho_tol));
    }
};

namespace detail {

/// Two-pass modified Gram-Schmidt projection of `v` against `accepted`.
/// The second pass mops up the rounding left by the first, which is what
/// keeps downstream basis changes unitary at the 1e-8 level.
inline void project_out(const std::vector<SampledMode>& accepted, SampledMode& v) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : accepted)
            v.amp -= overlap(q, v) * q.amp;
}

} // namespace detail

/// Orthonormalizes `raw` in order. Candidates whose residual after
/// projection falls below tol * (input norm) are dropped, as are
/// exactly-zero inputs. Accepted modes keep the order in which they
/// survived.
inline ModeBasis gram_schmidt(const std::vector<SampledMode>& raw,
                              double tol = kGramSchmidtDropTol) {
    std::vector<SampledMode> accepted;
    for (const auto& v : raw) {
        double in_norm = v.norm();
        if (in_norm <= 0.0)
            continue;
        SampledMode w = v;
        detail::project_out(accepted, w);
        double res = w.norm();
        if (res < tol * in_norm)
            continue;
        w.amp /= res;
        accepted.push_back(std::move(w));
    }
    return ModeBasis(std::move(accepted), std::max(tol, 1e-12));
}

/// Extends `partial` with pool modes until it reaches
/// max(partial.size, pool.size) modes, preserving the partial modes in
/// their original slots. Pool modes already represented in the span are
/// skipped; if the pool runs out of independent directions before the
/// target size is reached, a warning is recorded in the metadata.
inline ModeBasis complete_basis(const ModeBasis& partial, const ModeBasis& pool) {
    if (partial.empty() && pool.empty())
        return ModeBasis();
    if (!partial.empty() && !pool.empty() && !(partial.grid() == pool.grid()))
        throw shape_error("complete_basis: partial and pool grids differ");

    const size_t target = std::max(partial.modes.size(), pool.modes.size());
    std::vector<SampledMode> out = partial.modes;
    for (const auto& cand : pool.modes) {
        if (out.size() >= target)
            break;
        double in_norm = cand.norm();
        if (in_norm <= 0.0)
            continue;
        SampledMode w = cand;
        detail::project_out(out, w);
        double res = w.norm();
        if (res < kGramSchmidtDropTol * in_norm)
            continue;
        w.amp /= res;
        out.push_back(std::move(w));
    }

    BasisMetadata md = partial.metadata;
    if (out.size() < target)
        md.warnings.push_back("complete_basis: pool spans only " +
                              std::to_string(out.size()) + " of " +
                              std::to_string(target) + " requested modes");
    double tol = std::max(partial.ortho_tol, kGramSchmidtDropTol);
    return ModeBasis(std::move(out), tol, std::move(md));
}

/// Re-orthonormalizes a basis on its own grid without changing its span
/// or mode count. Sampled analytic bases are orthonormal only to
/// discretization accuracy; quadrature-exact pipelines (basis changes,
/// variance cross-checks) polish them through here first.
inline ModeBasis orthonormalized(const ModeBasis& basis) {
    if (basis.empty())
        return basis;
    ModeBasis polished = gram_schmidt(basis.modes);
    if (polished.size() != basis.size())
        throw validation_error("orthonormalized: basis lost rank during polishing");
    polished.metadata = basis.metadata;
    return polished;
}

} // namespace detmode
