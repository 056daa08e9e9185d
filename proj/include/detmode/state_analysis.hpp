#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "gaussian_state.hpp"
#include "mode_basis.hpp"

namespace detmode {

/// Normalized transverse profile of the mean field,
/// v0 = sum_i <a_i> u_i / sqrt(N0), together with N0 = sum |<a_i>|^2.
/// A state with no mean field has no such profile and is rejected.
inline std::pair<SampledMode, double> mean_field_mode(const GaussianState& s,
                                                      const ModeBasis& basis) {
    if (basis.size() != s.dim())
        throw shape_error("mean_field_mode: basis size does not match state dimension");
    const double n0 = s.mean_photons();
    if (n0 <= 0.0)
        throw degenerate_error("mean_field_mode: state has zero mean field");
    SampledMode v0 = linear_combination(basis.modes, s.mean);
    return {v0.normalized(), n0};
}

namespace detail {

/// Columns spanning every mode-space direction the state actually
/// occupies: the mean vector plus the columns of conj(photon) and of
/// anomalous. A mode orthogonal to all of them is in vacuum and
/// uncorrelated with the rest, and stays that way under any unitary
/// relabeling, because mean -> U mean, conj(photon) -> U conj(photon) U^dag
/// and anomalous -> U anomalous U^T transform covariantly.
inline Eigen::MatrixXcd occupied_directions(const GaussianState& s) {
    const int n = s.dim();
    FluctuationMoments fm = fluctuation_moments(s);
    Eigen::MatrixXcd m(n, 2 * n + 1);
    const double norm = s.mean.norm();
    m.col(0) = norm > 0.0 ? Eigen::VectorXcd(s.mean / norm)
                          : Eigen::VectorXcd(Eigen::VectorXcd::Zero(n));
    m.block(0, 1, n, n) = fm.photon.conjugate();
    m.block(0, n + 1, n, n) = fm.anomalous;
    return m;
}

} // namespace detail

/// Minimum number of modes that must differ from vacuum to represent the
/// state, over all unitary mode relabelings: the rank of the occupied
/// directions. Vacuum has degree 0, any displaced or squeezed single
/// mode degree 1.
inline int degree(const GaussianState& s, double tol = 1e-8) {
    Eigen::MatrixXcd m = detail::occupied_directions(s);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0)
        return 0;
    const double thresh = tol * std::max(sv[0], 1.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > thresh)
            ++rank;
    return rank;
}

/// A state is single mode when one mode carries everything:
/// degree(s) <= 1.
inline bool is_single_mode(const GaussianState& s, double tol = 1e-8) {
    return degree(s, tol) <= 1;
}

struct EigenbasisResult {
    /// New mode functions; the first mode is the mean-field profile and
    /// the first `degree` modes carry everything non-vacuum.
    ModeBasis basis;
    /// The state relabeled to the new basis. Its mean is
    /// (sqrt(N0), 0, ..., 0).
    GaussianState state;
    /// Operator map applied, b = unitary * a.
    Eigen::MatrixXcd unitary;
    int degree = 0;
};

/// Rotates a state with nonzero mean field into the basis whose first
/// mode is the mean-field profile and whose first degree(s) modes span
/// all occupied directions; the remaining modes are vacuum.
///
/// Mode functions transform with the conjugate coefficients of the
/// operators: if b = U a then the new profiles are
/// v_i = sum_j conj(U_ij) u_j, so each v_i keeps the field expansion
/// sum_i b_i v_i = sum_j a_j u_j intact.
inline EigenbasisResult eigenbasis(const GaussianState& s, const ModeBasis& basis) {
    if (basis.size() != s.dim())
        throw shape_error("eigenbasis: basis size does not match state dimension");
    const int n = s.dim();
    const double mean_norm = s.mean.norm();
    if (mean_norm <= 0.0)
        throw degenerate_error("eigenbasis: state has zero mean field");

    // Orthonormal coefficient vectors q_0, q_1, ... in mode space:
    // q_0 along the mean, then the occupied directions, then standard
    // completion. Plain Gram-Schmidt with a second pass, like the
    // mode-space version in mode_basis.hpp.
    std::vector<Eigen::VectorXcd> q;
    q.push_back(s.mean / mean_norm);

    auto try_accept = [&](Eigen::VectorXcd cand, double drop_tol) {
        const double in_norm = cand.norm();
        if (in_norm <= 0.0)
            return;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& prev : q)
                cand -= prev.dot(cand) * prev;
        const double res = cand.norm();
        if (res < drop_tol * in_norm)
            return;
        q.push_back(cand / res);
    };

    Eigen::MatrixXcd occ = detail::occupied_directions(s);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(occ, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double thresh = (sv.size() > 0 ? 1e-8 * std::max(sv[0], 1.0) : 0.0);
    int occupied_rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv[k] <= thresh)
            break;
        ++occupied_rank;
        if (static_cast<int>(q.size()) < n)
            try_accept(svd.matrixU().col(k), 1e-7);
    }

    for (int j = 0; j < n && static_cast<int>(q.size()) < n; ++j)
        try_accept(Eigen::VectorXcd::Unit(n, j), kGramSchmidtDropTol);
    if (static_cast<int>(q.size()) != n)
        throw validation_error("eigenbasis: failed to complete the mode-space basis");

    Eigen::MatrixXcd u(n, n);
    for (int i = 0; i < n; ++i)
        u.row(i) = q[static_cast<size_t>(i)].adjoint();

    EigenbasisResult out;
    out.unitary = u;
    out.state = basis_change(s, u);
    out.degree = degree(s);

    std::vector<SampledMode> modes;
    modes.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        modes.push_back(linear_combination(basis.modes, q[static_cast<size_t>(i)]));
    // Unitary recombination preserves the Gram spectrum of the input
    // basis; the entrywise deviation can spread by at most the mode count.
    double tol = std::max(basis.ortho_tol * std::max(1, basis.size()), 1e-12);
    out.basis = ModeBasis(std::move(modes), tol, basis.metadata);
    return out;
}

} // namespace detmode
