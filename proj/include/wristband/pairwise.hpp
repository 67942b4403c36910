#pragma once

// Three-image reflected kernel on S^{d-1} x [0,1] and the O(N^2 d) pairwise
// repulsion loss built from it.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "kernel_config.hpp"
#include "point_batch.hpp"
#include "wristband_map.hpp"

namespace wristband {

/// exp(-beta alpha^2 |u - u2|^2) for unit vectors.
inline double angular_kernel(std::span<const double> u, std::span<const double> u2, const KernelConfig& cfg) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double diff = u[k] - u2[k];
        d2 += diff * diff;
    }
    return std::exp(-cfg.beta * cfg.alpha * cfg.alpha * d2);
}

/// Real point plus its reflections across 0 and 1.
inline double radial_image_kernel(double t, double t2, double beta) {
    const double a = t - t2;
    const double b = t + t2;
    const double c = t + t2 - 2.0;
    return std::exp(-beta * a * a) + std::exp(-beta * b * b) + std::exp(-beta * c * c);
}

/// Infinite-image Neumann kernel truncated to m in [-images, images] in both sums.
inline double radial_neumann_kernel(double t, double t2, double beta, int images) {
    require(images >= 1, "radial_neumann_kernel: images must be >= 1");
    double sum = 0.0;
    for (int m = -images; m <= images; ++m) {
        const double a = t - t2 - 2.0 * m;
        const double b = t + t2 - 2.0 * m;
        sum += std::exp(-beta * a * a) + std::exp(-beta * b * b);
    }
    return sum;
}

/// Loss value with cotangents on the wristband coordinates (u, t).
struct WristbandGrad {
    double value = 0.0;
    std::vector<double> grad_u;
    std::vector<double> grad_t;
};

namespace pairwise_detail {

// K_img(i, j) = sum of the three images with the angular factor folded into each exponent.
struct PairTerms {
    double e_direct, e_zero, e_one;
    double total() const noexcept { return e_direct + e_zero + e_one; }
};

inline PairTerms pair_terms(double cos_ij, double ti, double tj, double beta, double c) {
    const double ang = -c * (1.0 - cos_ij);
    const double a = ti - tj;
    const double b = ti + tj;
    const double e = ti + tj - 2.0;
    return {std::exp(ang - beta * a * a), std::exp(ang - beta * b * b), std::exp(ang - beta * e * e)};
}

// Self term: angular factor 1, real image 1, plus two reflected self-images.
inline double self_reflections(double t, double beta) {
    return std::exp(-4.0 * beta * t * t) + std::exp(-4.0 * beta * (t - 1.0) * (t - 1.0));
}
inline double self_reflections_dt(double t, double beta) {
    return -8.0 * beta * t * std::exp(-4.0 * beta * t * t) -
           8.0 * beta * (t - 1.0) * std::exp(-4.0 * beta * (t - 1.0) * (t - 1.0));
}

// Row sums R_i = sum_j K_img(i, j) including the real self term.
inline std::vector<double> row_sums(const WristbandBatch& wb, const KernelConfig& cfg) {
    const std::size_t n = wb.n;
    const double c = cfg.angular_c();
    std::vector<double> rows(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i] += 1.0 + self_reflections(wb.t[i], cfg.beta);
        const auto ui = wb.dir(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = pair_terms(dot(ui, wb.dir(j)), wb.t[i], wb.t[j], cfg.beta, c).total();
            rows[i] += k;
            rows[j] += k;
        }
    }
    return rows;
}

// Accumulates grad of F = sum_{i,j} weight_ij K_img(i, j) where the pair weight is
// row_weight[i] + row_weight[j] for i != j and row_weight[i] on the diagonal; returns F.
inline double accumulate_grad(const WristbandBatch& wb, const KernelConfig& cfg, std::span<const double> row_weight,
                            std::vector<double>& grad_u, std::vector<double>& grad_t) {
    const std::size_t n = wb.n;
    const std::size_t d = wb.dim;
    const double c = cfg.angular_c();
    const double beta = cfg.beta;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = wb.t[i];
        total += row_weight[i] * (1.0 + self_reflections(ti, beta));
        grad_t[i] += row_weight[i] * self_reflections_dt(ti, beta);
        const auto ui = wb.dir(i);
        double* gui = grad_u.data() + i * d;
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto uj = wb.dir(j);
            const double tj = wb.t[j];
            const PairTerms p = pair_terms(dot(ui, uj), ti, tj, beta, c);
            const double w = row_weight[i] + row_weight[j];
            const double k = p.total();
            total += w * k;
            const double dk_dcos = w * c * k;
            const double a = ti - tj;
            const double b = ti + tj;
            const double e = ti + tj - 2.0;
            const double common = b * p.e_zero + e * p.e_one;
            grad_t[i] += w * -2.0 * beta * (a * p.e_direct + common);
            grad_t[j] += w * -2.0 * beta * (-a * p.e_direct + common);
            double* guj = grad_u.data() + j * d;
            for (std::size_t k2 = 0; k2 < d; ++k2) {
                gui[k2] += dk_dcos * uj[k2];
                guj[k2] += dk_dcos * ui[k2];
            }
        }
    }
    return total;
}

}  // namespace pairwise_detail

/// Pairwise repulsion in wristband coordinates, value only.
inline double pairwise_repulsion_value(const WristbandBatch& wb, const KernelConfig& cfg) {
    require(wb.n >= 1, "pairwise_repulsion: empty batch");
    const double n = static_cast<double>(wb.n);
    const std::vector<double> rows = pairwise_detail::row_sums(wb, cfg);
    if (cfg.reduction == Reduction::global) {
        double z = 0.0;
        for (double r : rows) z += r;
        return std::log((z - n) / (3.0 * n * n - n) + cfg.eps) / cfg.beta;
    }
    double acc = 0.0;
    for (double r : rows) acc += std::log((r - 1.0) / (3.0 * n - 1.0) + cfg.eps);
    return acc / (n * cfg.beta);
}

/// Pairwise repulsion in wristband coordinates with cotangents on (u, t).
///
/// global:    (1/beta) log((sum_ij K - N) / (3N^2 - N) + eps)
/// per_point: mean_i (1/beta) log((sum_j K_ij - 1) / (3N - 1) + eps)
inline WristbandGrad pairwise_repulsion_wb(const WristbandBatch& wb, const KernelConfig& cfg) {
    require(wb.n >= 1, "pairwise_repulsion: empty batch");
    const std::size_t n = wb.n;
    const double nd = static_cast<double>(n);

    WristbandGrad out;
    out.grad_u.assign(n * wb.dim, 0.0);
    out.grad_t.assign(n, 0.0);
    if (cfg.reduction == Reduction::global) {
        // unit row weights give grad of z = sum_ij K in a single pass; rescale after
        const std::vector<double> ones(n, 1.0);
        const double z = pairwise_detail::accumulate_grad(wb, cfg, ones, out.grad_u, out.grad_t);
        const double denom = 3.0 * nd * nd - nd;
        const double arg = (z - nd) / denom + cfg.eps;
        out.value = std::log(arg) / cfg.beta;
        const double dz = 1.0 / (cfg.beta * arg * denom);
        for (double& g : out.grad_u) g *= dz;
        for (double& g : out.grad_t) g *= dz;
        return out;
    }

    const std::vector<double> rows = pairwise_detail::row_sums(wb, cfg);
    std::vector<double> row_weight(n);
    {
        const double denom = 3.0 * nd - 1.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double arg = (rows[i] - 1.0) / denom + cfg.eps;
            acc += std::log(arg);
            row_weight[i] = 1.0 / (nd * cfg.beta * arg * denom);
        }
        out.value = acc / (nd * cfg.beta);
    }
    pairwise_detail::accumulate_grad(wb, cfg, row_weight, out.grad_u, out.grad_t);
    return out;
}

/// Pairwise repulsion loss with gradient with respect to the raw points.
inline LossValueGrad pairwise_repulsion_loss(const PointBatch& batch, const KernelConfig& cfg) {
    require(batch.n() >= 1, "pairwise_repulsion_loss: empty batch");
    cfg.validate();
    const WristbandBatch wb = wristband_forward(batch);
    WristbandGrad g = pairwise_repulsion_wb(wb, cfg);
    return {g.value, wristband_backward(batch, wb, g.grad_u, g.grad_t)};
}

/// Mean kernel energy (1/N^2) sum_ij k_ang k_rad over all pairs including self-pairs,
/// with the three-image radial kernel, or the Neumann kernel when images > 0.
inline double kernel_energy(const WristbandBatch& wb, const KernelConfig& cfg, int images = 0) {
    const std::size_t n = wb.n;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto ui = wb.dir(i);
        for (std::size_t j = i; j < n; ++j) {
            const double ang = angular_kernel(ui, wb.dir(j), cfg);
            const double rad = images > 0 ? radial_neumann_kernel(wb.t[i], wb.t[j], cfg.beta, images)
                                          : radial_image_kernel(wb.t[i], wb.t[j], cfg.beta);
            acc += (i == j ? 1.0 : 2.0) * ang * rad;
        }
    }
    return acc / (static_cast<double>(n) * static_cast<double>(n));
}

}  // namespace wristband
