#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "detection.hpp"
#include "gaussian_state.hpp"
#include "mode_basis.hpp"
#include "pixel_layout.hpp"

namespace detmode {

struct SimConfig {
    long long n_samples = 100000;
    std::uint64_t seed = 0;
    int shards = 1;
};

struct SimResult {
    double sample_mean = 0.0;
    /// Unbiased (n-1) sample variance; NaN for a single sample.
    double sample_variance = 0.0;
    /// Standard error of sample_variance from batch means (up to 100
    /// batches); NaN for a single sample, 0 for constant samples.
    double stderr_variance = 0.0;
    long long n_samples = 0;
};

/// Counter-based stream: the k-th output is the splitmix64 finalizer
/// applied to key + k * golden ratio. Streams for different (seed,
/// stream) pairs are independent for any practical purpose, every shard
/// gets its own, and the sequence depends on nothing but (seed, stream,
/// k), which is what makes runs reproducible across platforms.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) {
        key_ = mix(mix(seed + 0x9E3779B97F4A7C15ull) ^ mix(stream + 0x1F123BB5159A55E5ull));
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ull); }

    /// Uniform on the open interval (0, 1).
    double next_double() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller, generated in pairs.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_double();
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Poisson deviate: product-of-uniforms inversion for small rates,
    /// Hormann's PTRS transformed rejection above rate 10.
    long long next_poisson(double rate) {
        if (!(rate >= 0.0) || !std::isfinite(rate))
            throw shape_error("next_poisson: rate must be finite and >= 0");
        if (rate == 0.0)
            return 0;
        if (rate < 10.0) {
            const double floor_prob = std::exp(-rate);
            long long k = 0;
            double prod = next_double();
            while (prod > floor_prob) {
                ++k;
                prod *= next_double();
            }
            return k;
        }
        const double b = 0.931 + 2.53 * std::sqrt(rate);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double log_rate = std::log(rate);
        for (;;) {
            const double u = next_double() - 0.5;
            const double v = next_double();
            const double us = 0.5 - std::abs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + rate + 0.43);
            if (us >= 0.07 && v <= v_r)
                return static_cast<long long>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us))
                continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                kf * log_rate - rate - std::lgamma(kf + 1.0))
                return static_cast<long long>(kf);
        }
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

namespace detail {

inline void check_sim_config(const SimConfig& cfg) {
    if (cfg.n_samples < 1)
        throw config_error("monte_carlo.n_samples: must be >= 1");
    if (cfg.shards < 1)
        throw config_error("monte_carlo.shards: must be >= 1");
}

/// Number of samples shard `k` draws: near-equal split, earlier shards
/// take the remainder.
inline long long shard_quota(long long n_samples, int shards, int k) {
    const long long base = n_samples / shards;
    const long long extra = n_samples % shards;
    return base + (k < extra ? 1 : 0);
}

/// Mean, unbiased variance and a batch-means standard error of the
/// variance, from the samples in shard order.
inline SimResult summarize(const std::vector<double>& samples) {
    SimResult r;
    r.n_samples = static_cast<long long>(samples.size());
    double sum = 0.0;
    for (double x : samples)
        sum += x;
    r.sample_mean = sum / static_cast<double>(samples.size());
    if (samples.size() < 2) {
        r.sample_variance = std::numeric_limits<double>::quiet_NaN();
        r.stderr_variance = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    double ss = 0.0;
    for (double x : samples) {
        const double d = x - r.sample_mean;
        ss += d * d;
    }
    const auto n = static_cast<double>(samples.size());
    r.sample_variance = ss / (n - 1.0);

    const int batches = static_cast<int>(std::min<long long>(100, r.n_samples));
    std::vector<double> batch_var(static_cast<size_t>(batches), 0.0);
    size_t pos = 0;
    for (int b = 0; b < batches; ++b) {
        const long long quota = shard_quota(r.n_samples, batches, b);
        double acc = 0.0;
        for (long long i = 0; i < quota; ++i, ++pos) {
            const double d = samples[pos] - r.sample_mean;
            acc += d * d;
        }
        batch_var[static_cast<size_t>(b)] = acc / static_cast<double>(quota);
    }
    double bmean = 0.0;
    for (double v : batch_var)
        bmean += v;
    bmean /= batches;
    double bss = 0.0;
    for (double v : batch_var) {
        const double d = v - bmean;
        bss += d * d;
    }
    r.stderr_variance = std::sqrt(bss / (batches * (batches - 1.0)));
    return r;
}

} // namespace detail

/// Draws gained-pixel measurement outcomes from the linearized model:
/// quadrature fluctuations dR ~ N(0, cov) plus the vacuum noise of the
/// detection-mode component outside the basis span, pushed through the
/// measurement form dN = g . dR. The estimated variance converges to
/// variance_direct. Deterministic in (seed, shards): shard k draws its
/// quota from its own stream and the shard outputs are concatenated in
/// shard order.
inline SimResult simulate_linearized(const GaussianState& s, const ModeBasis& basis,
                                     const PixelLayout& layout, const SimConfig& cfg) {
    detail::check_sim_config(cfg);
    auto [v0, n0] = mean_field_mode(s, basis);
    const DetectionMode dm = detection_mode(v0, layout);
    const Eigen::VectorXd integrals = pixel_integrals(v0, layout);
    const double mean_signal = n0 * layout.gains.dot(integrals);

    const int n = s.dim();
    Eigen::VectorXcd c(n);
    for (int i = 0; i < n; ++i)
        c[i] = std::sqrt(n0) * dm.f * overlap(basis[i], dm.w1);
    // dN = sum_i (C_i da_i^dag + c.c.) = g . dR with
    // g = (Re C_0, Im C_0, Re C_1, ...).
    Eigen::VectorXd g(2 * n);
    for (int i = 0; i < n; ++i) {
        g[2 * i] = c[i].real();
        g[2 * i + 1] = c[i].imag();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.cov);
    if (es.info() != Eigen::Success)
        throw error("simulate_linearized: covariance eigendecomposition failed");
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-10)
        throw shape_error("simulate_linearized: covariance has negative eigenvalue " +
                          std::to_string(min_eig));
    Eigen::VectorXd sqrt_eig = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    // g . (L z) = (L^T g) . z for L = E sqrt(diag), one dot per sample.
    Eigen::VectorXd h = sqrt_eig.asDiagonal() * (es.eigenvectors().transpose() * g);
    // Detection-mode weight outside the basis span is vacuum: the
    // completeness gap N0 f^2 - |C|^2 enters as one more unit normal.
    const double out_of_span = std::sqrt(std::max(0.0, n0 * dm.f * dm.f - g.squaredNorm()));

    std::vector<double> samples;
    samples.reserve(static_cast<size_t>(cfg.n_samples));
    for (int shard = 0; shard < cfg.shards; ++shard) {
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(shard));
        const long long quota = detail::shard_quota(cfg.n_samples, cfg.shards, shard);
        for (long long i = 0; i < quota; ++i) {
            double fluct = 0.0;
            for (Eigen::Index k = 0; k < h.size(); ++k)
                fluct += h[k] * rng.next_normal();
            fluct += out_of_span * rng.next_normal();
            samples.push_back(mean_signal + fluct);
        }
    }
    return detail::summarize(samples);
}

/// Draws the same measurement for a purely coherent beam from the exact
/// photon statistics: independent Poisson counts per pixel with rates
/// n0 int_{D_j} |v0|^2, combined with the pixel gains. The estimated
/// variance converges to n0 sum_j gain_j^2 int_{D_j} |v0|^2 = f^2 N0.
inline SimResult simulate_poisson(const SampledMode& v0, double n0,
                                  const PixelLayout& layout, const SimConfig& cfg) {
    detail::check_sim_config(cfg);
    if (!(n0 > 0.0) || !std::isfinite(n0))
        throw degenerate_error("simulate_poisson: mean photon number must be positive");
    const Eigen::VectorXd integrals = pixel_integrals(v0.normalized(), layout);

    std::vector<double> samples;
    samples.reserve(static_cast<size_t>(cfg.n_samples));
    for (int shard = 0; shard < cfg.shards; ++shard) {
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(shard));
        const long long quota = detail::shard_quota(cfg.n_samples, cfg.shards, shard);
        for (long long i = 0; i < quota; ++i) {
            double value = 0.0;
            for (int j = 0; j < layout.pixel_count(); ++j)
                value += layout.gains[j] *
                         static_cast<double>(rng.next_poisson(n0 * integrals[j]));
            samples.push_back(value);
        }
    }
    return detail::summarize(samples);
}

} // namespace detmode
