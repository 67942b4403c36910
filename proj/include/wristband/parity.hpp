#pragma once

// Spectral-vs-pairwise parity (gradient cosine, value correlation), CPU timing
// sweeps, and the central finite-difference gradient harness.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "generators.hpp"
#include "kernel_config.hpp"
#include "pairwise.hpp"
#include "point_batch.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace wristband {

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) return na == nb ? 1.0 : 0.0;
    return dot(a, b) / (na * nb);
}

inline double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "pearson_correlation: need two equal-length samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

struct GradientComparison {
    double pairwise_value = 0.0;
    double spectral_value = 0.0;
    double cosine = 0.0;
};

/// Cosine between the flattened input-gradients (w.r.t. the raw points) of the
/// pairwise and K-mode spectral repulsion losses.
inline GradientComparison gradient_cosine(const PointBatch& batch, const KernelConfig& cfg, int modes) {
    if (batch.dim() < 3) throw UnsupportedDimension("gradient_cosine: spectral path requires d >= 3");
    KernelConfig spec_cfg = cfg;
    spec_cfg.modes = modes;
    const LossValueGrad pw = pairwise_repulsion_loss(batch, cfg);
    const LossValueGrad sp = spectral_loss(batch, spec_cfg);
    return {pw.value, sp.value, cosine_similarity(pw.grad, sp.grad)};
}

struct ParitySummary {
    std::size_t dim = 0;
    std::size_t n = 0;
    int modes = 0;
    std::vector<GradientComparison> rows;  // generator-major, seed-minor
    double mean_cosine = 0.0;
    double min_cosine = 0.0;
    double value_correlation = 0.0;
};

/// Every parity generator x seeds 0..seeds-1, streams "parity/<kind>/<d>/<n>/<seed>".
inline ParitySummary parity_study(std::size_t d, std::size_t n, int modes, std::size_t seeds, const KernelConfig& cfg,
                                  std::uint64_t base_seed = 0) {
    ParitySummary s;
    s.dim = d;
    s.n = n;
    s.modes = modes;
    std::vector<double> pv, sv;
    s.min_cosine = 1.0;
    for (ParityKind kind : kAllParityKinds) {
        for (std::size_t k = 0; k < seeds; ++k) {
            RngStream rng(base_seed + k, "parity/" + to_string(kind) + "/" + std::to_string(d) + "/" + std::to_string(n));
            const PointBatch b = parity_batch(kind, n, d, rng);
            const GradientComparison g = gradient_cosine(b, cfg, modes);
            s.rows.push_back(g);
            s.mean_cosine += g.cosine;
            s.min_cosine = std::min(s.min_cosine, g.cosine);
            pv.push_back(g.pairwise_value);
            sv.push_back(g.spectral_value);
        }
    }
    s.mean_cosine /= static_cast<double>(s.rows.size());
    s.value_correlation = s.rows.size() >= 2 ? pearson_correlation(pv, sv) : 1.0;
    return s;
}

struct TimingRow {
    std::size_t dim = 0;
    std::size_t n = 0;
    double pairwise_ms = 0.0;  // median forward + backward
    double spectral_ms = 0.0;
    double speedup() const { return pairwise_ms / spectral_ms; }
};

namespace parity_detail {

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <typename Fn>
double median_ms(Fn&& fn, std::size_t warmup, std::size_t repetitions) {
    for (std::size_t i = 0; i < warmup; ++i) fn();
    std::vector<double> times;
    times.reserve(repetitions);
    for (std::size_t i = 0; i < repetitions; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return median(std::move(times));
}

}  // namespace parity_detail

/// Median wall time of pairwise and spectral forward+backward per (d, N) on
/// Gaussian batches. Warm-up runs are discarded.
inline std::vector<TimingRow> timing_sweep(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& ns,
                                           int modes, std::size_t repetitions, const KernelConfig& cfg,
                                           std::size_t warmup = 1) {
    require(repetitions >= 1, "timing_sweep: repetitions must be >= 1");
    KernelConfig spec_cfg = cfg;
    spec_cfg.modes = modes;
    std::vector<TimingRow> rows;
    volatile double sink = 0.0;
    for (std::size_t d : dims) {
        for (std::size_t n : ns) {
            RngStream rng(0, "timing/" + std::to_string(d) + "/" + std::to_string(n));
            const PointBatch b = gaussian_batch(n, d, rng);
            TimingRow row{d, n, 0.0, 0.0};
            row.pairwise_ms = parity_detail::median_ms([&] { sink = sink + pairwise_repulsion_loss(b, cfg).value; },
                                                       warmup, repetitions);
            row.spectral_ms = parity_detail::median_ms([&] { sink = sink + spectral_loss(b, spec_cfg).value; },
                                                       warmup, repetitions);
            rows.push_back(row);
        }
    }
    return rows;
}

struct FdReport {
    double max_rel_err = 0.0;  // max_k |fd_k - g_k| / max(|g|_inf, |fd|_inf)
    double rel_l2_err = 0.0;   // |fd - g|_2 / |g|_2
    double cosine = 0.0;
};

/// Central differences with per-coordinate step h_scale * (1 + |x|).
inline FdReport finite_difference_check(const std::function<LossValueGrad(const PointBatch&)>& loss,
                                        const PointBatch& batch, double h_scale = 1e-5) {
    require(batch.n() <= 64, "finite_difference_check: batch too large (N <= 64)");
    const LossValueGrad base = loss(batch);
    require(base.grad.size() == batch.size(), "finite_difference_check: gradient has wrong length");
    std::vector<double> fd(batch.size());
    PointBatch work = batch;
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const double x = batch.data()[k];
        const double h = h_scale * (1.0 + std::fabs(x));
        work.data()[k] = x + h;
        const double up = loss(work).value;
        work.data()[k] = x - h;
        const double down = loss(work).value;
        work.data()[k] = x;
        fd[k] = (up - down) / (2.0 * h);
    }
    FdReport r;
    double g_inf = 0.0, fd_inf = 0.0, worst = 0.0, diff2 = 0.0;
    for (std::size_t k = 0; k < fd.size(); ++k) {
        g_inf = std::max(g_inf, std::fabs(base.grad[k]));
        fd_inf = std::max(fd_inf, std::fabs(fd[k]));
        worst = std::max(worst, std::fabs(fd[k] - base.grad[k]));
        diff2 += (fd[k] - base.grad[k]) * (fd[k] - base.grad[k]);
    }
    const double scale = std::max(g_inf, fd_inf);
    r.max_rel_err = scale > 0.0 ? worst / scale : 0.0;
    const double gn = norm(base.grad);
    r.rel_l2_err = gn > 0.0 ? std::sqrt(diff2) / gn : std::sqrt(diff2);
    r.cosine = cosine_similarity(fd, base.grad);
    return r;
}

}  // namespace wristband
