#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "mode.hpp"

namespace detmode {

/// Single-mode squeezing applied to the vacuum of one mode.
/// angle = 0 squeezes the X quadrature: variance e^{-2r} along X,
/// e^{+2r} along Y; the squeezed axis rotates with `angle`.
struct SqueezerSpec {
    int mode_index = 0;
    double r = 0.0;
    double angle = 0.0;
};

/// Gaussian state of n optical modes: mean field amplitudes <a_i> plus
/// the real symmetric covariance of the quadratures X_i = a_i + a_i^dag,
/// Y_i = i (a_i^dag - a_i), stored interleaved (X_0, Y_0, X_1, Y_1, ...).
/// Vacuum has cov = identity. Physicality is cov + i Omega >= 0 with
/// Omega the block-diagonal symplectic form [[0, 1], [-1, 0]].
struct GaussianState {
    Eigen::VectorXcd mean;
    Eigen::MatrixXd cov;

    GaussianState() = default;

    GaussianState(Eigen::VectorXcd mean_, Eigen::MatrixXd cov_)
        : mean(std::move(mean_)), cov(std::move(cov_)) {
        if (cov.rows() != cov.cols() || cov.rows() != 2 * mean.size())
            throw shape_error("GaussianState: covariance must be 2n x 2n");
        if (!mean.allFinite() || !cov.allFinite())
            throw shape_error("GaussianState: non-finite entries");
        double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-10)
            throw shape_error("GaussianState: covariance asymmetry " + std::to_string(asym));
    }

    int dim() const { return static_cast<int>(mean.size()); }

    /// Mean photon number carried by the mean field, N0 = sum |<a_i>|^2.
    double mean_photons() const { return mean.squaredNorm(); }
};

inline GaussianState vacuum_state(int dim) {
    if (dim < 1)
        throw shape_error("vacuum_state: dim must be >= 1");
    return GaussianState(Eigen::VectorXcd::Zero(dim),
                         Eigen::MatrixXd::Identity(2 * dim, 2 * dim));
}

/// Most negative eigenvalue (sign flipped, clamped at 0) of cov + i Omega.
/// Zero for any physical covariance, positive by the amount the
/// uncertainty relation is violated.
inline double physicality_deficit(const GaussianState& s) {
    const int n = s.dim();
    Eigen::MatrixXcd m = s.cov.cast<cplx>();
    for (int i = 0; i < n; ++i) {
        m(2 * i, 2 * i + 1) += cplx(0.0, 1.0);
        m(2 * i + 1, 2 * i) += cplx(0.0, -1.0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return std::max(0.0, -es.eigenvalues().minCoeff());
}

inline bool is_physical(const GaussianState& s, double tol = 1e-8) {
    return physicality_deficit(s) <= tol;
}

/// Builds a state from coherent displacements and independent squeezers
/// on vacuum. Coherent entries set <a_i>; squeezers set the 2x2
/// covariance block of their mode. Duplicate indices are rejected, as
/// are indices outside [0, dim).
inline GaussianState make_state(int dim,
                                const std::vector<std::pair<int, cplx>>& coherent,
                                const std::vector<SqueezerSpec>& squeezers) {
    GaussianState s = vacuum_state(dim);
    std::vector<bool> seen_coherent(static_cast<size_t>(dim), false);
    for (const auto& [idx, amp] : coherent) {
        if (idx < 0 || idx >= dim)
            throw shape_error("make_state: coherent mode index " + std::to_string(idx) +
                              " outside [0, " + std::to_string(dim) + ")");
        if (seen_coherent[static_cast<size_t>(idx)])
            throw shape_error("make_state: duplicate coherent index " + std::to_string(idx));
        seen_coherent[static_cast<size_t>(idx)] = true;
        s.mean[idx] = amp;
    }
    std::vector<bool> seen_squeezer(static_cast<size_t>(dim), false);
    for (const auto& sq : squeezers) {
        if (sq.mode_index < 0 || sq.mode_index >= dim)
            throw shape_error("make_state: squeezer mode index " +
                              std::to_string(sq.mode_index) + " outside [0, " +
                              std::to_string(dim) + ")");
        if (seen_squeezer[static_cast<size_t>(sq.mode_index)])
            throw shape_error("make_state: duplicate squeezer index " +
                              std::to_string(sq.mode_index));
        if (!std::isfinite(sq.r) || !std::isfinite(sq.angle))
            throw shape_error("make_state: non-finite squeezer parameters");
        seen_squeezer[static_cast<size_t>(sq.mode_index)] = true;
        const double c = std::cos(sq.angle), sn = std::sin(sq.angle);
        Eigen::Matrix2d rot;
        rot << c, -sn, sn, c;
        Eigen::Matrix2d diag = Eigen::Vector2d(std::exp(-2.0 * sq.r),
                                               std::exp(2.0 * sq.r)).asDiagonal();
        s.cov.block<2, 2>(2 * sq.mode_index, 2 * sq.mode_index) =
            rot * diag * rot.transpose();
    }
    return s;
}

/// Real 2n x 2n image of a complex n x n mode-space matrix under the
/// quadrature convention above: each entry U_ij becomes the 2x2 block
/// [[Re, -Im], [Im, Re]].
inline Eigen::MatrixXd symplectic_image(const Eigen::MatrixXcd& u) {
    Eigen::MatrixXd o(2 * u.rows(), 2 * u.cols());
    for (Eigen::Index i = 0; i < u.rows(); ++i)
        for (Eigen::Index j = 0; j < u.cols(); ++j) {
            const double re = u(i, j).real(), im = u(i, j).imag();
            o(2 * i, 2 * j) = re;
            o(2 * i, 2 * j + 1) = -im;
            o(2 * i + 1, 2 * j) = im;
            o(2 * i + 1, 2 * j + 1) = re;
        }
    return o;
}

/// Passive relabeling of the mode operators, b = U a, for unitary U.
/// Means map as U * mean; the covariance maps by the symplectic image
/// O V O^T. Non-unitary input is rejected with the measured deviation.
inline GaussianState basis_change(const GaussianState& s, const Eigen::MatrixXcd& u,
                                  double unitarity_tol = 1e-8) {
    if (u.rows() != u.cols() || u.rows() != s.dim())
        throw shape_error("basis_change: matrix size does not match state dimension");
    double dev = (u * u.adjoint() - Eigen::MatrixXcd::Identity(u.rows(), u.rows()))
                     .cwiseAbs()
                     .maxCoeff();
    if (dev > unitarity_tol)
        throw shape_error("basis_change: matrix is not unitary, deviation " +
                          std::to_string(dev) + " exceeds " +
                          std::to_string(unitarity_tol));
    Eigen::MatrixXd o = symplectic_image(u);
    Eigen::MatrixXd cov = o * s.cov * o.transpose();
    cov = 0.5 * (cov + cov.transpose()).eval(); // kill rounding asymmetry
    return GaussianState(u * s.mean, std::move(cov));
}

/// Second moments of the fluctuation operators da_i = a_i - <a_i>.
struct FluctuationMoments {
    /// photon(i, j) = <da_i^dag da_j>, Hermitian positive semidefinite.
    Eigen::MatrixXcd photon;
    /// anomalous(i, j) = <da_i da_j>, symmetric.
    Eigen::MatrixXcd anomalous;
};

/// Extracts the fluctuation moments from the quadrature covariance by
/// inverting X = a + a^dag, Y = i (a^dag - a) entry by entry.
inline FluctuationMoments fluctuation_moments(const GaussianState& s) {
    const int n = s.dim();
    FluctuationMoments fm;
    fm.photon.resize(n, n);
    fm.anomalous.resize(n, n);
    const auto& v = s.cov;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double xx = v(2 * i, 2 * j);
            const double yy = v(2 * i + 1, 2 * j + 1);
            const double xy = v(2 * i, 2 * j + 1); // <sym X_i Y_j>
            const double yx = v(2 * i + 1, 2 * j); // <sym Y_i X_j>
            const double delta = (i == j) ? 1.0 : 0.0;
            fm.photon(i, j) = 0.25 * cplx(xx + yy - 2.0 * delta, xy - yx);
            fm.anomalous(i, j) = 0.25 * cplx(xx - yy, xy + yx);
        }
    return fm;
}

/// Indices of modes that differ from vacuum: displaced, excited, or
/// correlated with any other mode.
inline std::vector<int> non_vacuum_modes(const GaussianState& s, double tol = 1e-8) {
    const int n = s.dim();
    const double mean_scale = 1.0 + std::sqrt(s.mean_photons());
    std::vector<int> out;
    for (int i = 0; i < n; ++i) {
        bool active = std::abs(s.mean[i]) > tol * mean_scale;
        for (int r = 2 * i; r <= 2 * i + 1 && !active; ++r)
            for (int c = 0; c < 2 * n && !active; ++c) {
                const double want = (r == c) ? 1.0 : 0.0;
                if (std::abs(s.cov(r, c) - want) > tol)
                    active = true;
            }
        if (active)
            out.push_back(i);
    }
    return out;
}

} // namespace detmode
