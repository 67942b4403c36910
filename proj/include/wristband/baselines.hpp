#pragma once

// Comparison losses: multiscale Gaussian MMD against N(0, I) in closed form, and
// sliced W2 against Gaussian quantiles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "point_batch.hpp"
#include "rng.hpp"
#include "specfun.hpp"

namespace wristband {

inline const std::vector<double> kDefaultMmdMultipliers = {0.25, 0.5, 1.0, 2.0, 4.0};

/// Squared MMD to N(0, I_d), summed over bandwidths sigma = sqrt(d) * multiplier.
///
/// Empirical-empirical term is the V-statistic. Target expectations are exact:
///   E_y k(x, y)   = (s^2/(s^2+1))^{d/2} exp(-|x|^2 / (2(s^2+1)))
///   E_yy' k(y,y') = (s^2/(s^2+2))^{d/2}
inline LossValueGrad mmd_loss(const PointBatch& batch, const std::vector<double>& multipliers = kDefaultMmdMultipliers) {
    require(batch.n() >= 2, "mmd_loss: need at least two points");
    const std::size_t n = batch.n();
    const std::size_t d = batch.dim();
    const double nd = static_cast<double>(n);
    const double half_d = 0.5 * static_cast<double>(d);

    LossValueGrad out;
    out.grad.assign(n * d, 0.0);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = dot(batch.row(i), batch.row(i));

    for (double mult : multipliers) {
        const double s2 = mult * mult * static_cast<double>(d);
        const double inv_2s2 = 1.0 / (2.0 * s2);

        double xx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto xi = batch.row(i);
            double* gi = out.grad.data() + i * d;
            xx += 1.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                const auto xj = batch.row(j);
                const double dist2 = sq[i] + sq[j] - 2.0 * dot(xi, xj);
                const double k = std::exp(-std::max(dist2, 0.0) * inv_2s2);
                xx += 2.0 * k;
                // d/dx_i of (2/N^2) k(x_i, x_j) = -(2/N^2) k (x_i - x_j) / s^2
                const double coef = -2.0 * k / (nd * nd * s2);
                double* gj = out.grad.data() + j * d;
                for (std::size_t p = 0; p < d; ++p) {
                    const double diff = xi[p] - xj[p];
                    gi[p] += coef * diff;
                    gj[p] -= coef * diff;
                }
            }
        }
        const double cross_scale = std::pow(s2 / (s2 + 1.0), half_d);
        double xy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = cross_scale * std::exp(-sq[i] / (2.0 * (s2 + 1.0)));
            xy += e;
            // d/dx_i of -(2/N) e_i = (2/N) e_i x_i / (s^2 + 1)
            const double coef = 2.0 * e / (nd * (s2 + 1.0));
            const auto xi = batch.row(i);
            double* gi = out.grad.data() + i * d;
            for (std::size_t p = 0; p < d; ++p) gi[p] += coef * xi[p];
        }
        const double yy = std::pow(s2 / (s2 + 2.0), half_d);
        out.value += xx / (nd * nd) - 2.0 * xy / nd + yy;
    }
    return out;
}

/// Random unit directions for sliced W2, one per row.
inline std::vector<std::vector<double>> random_projections(std::size_t count, std::size_t d, RngStream& rng) {
    std::vector<std::vector<double>> dirs(count, std::vector<double>(d));
    for (auto& v : dirs) {
        double r = 0.0;
        do {
            for (double& x : v) x = rng.normal();
            r = norm(v);
        } while (r == 0.0);
        for (double& x : v) x /= r;
    }
    return dirs;
}

/// Gaussian quantiles inv_norm_cdf((i - 1/2)/N), i = 1..N.
inline std::vector<double> gaussian_quantiles(std::size_t n) {
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = inv_norm_cdf((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    return q;
}

/// Mean over projections of (1/N) sum_i (p_(i) - q_i)^2 with p = X theta sorted.
inline LossValueGrad sliced_w2_loss(const PointBatch& batch, const std::vector<std::vector<double>>& projections) {
    require(batch.n() >= 2, "sliced_w2_loss: need at least two points");
    require(!projections.empty(), "sliced_w2_loss: no projections");
    const std::size_t n = batch.n();
    const std::size_t d = batch.dim();
    const double nd = static_cast<double>(n);
    const double inv_l = 1.0 / static_cast<double>(projections.size());
    const std::vector<double> q = gaussian_quantiles(n);

    LossValueGrad out;
    out.grad.assign(n * d, 0.0);
    std::vector<double> p(n);
    std::vector<std::size_t> order(n);
    for (const auto& theta : projections) {
        require(theta.size() == d, "sliced_w2_loss: projection dimension mismatch");
        for (std::size_t i = 0; i < n; ++i) p[i] = dot(batch.row(i), theta);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t i = order[r];
            const double diff = p[i] - q[r];
            acc += diff * diff;
            const double coef = 2.0 * diff * inv_l / nd;
            double* gi = out.grad.data() + i * d;
            for (std::size_t k = 0; k < d; ++k) gi[k] += coef * theta[k];
        }
        out.value += acc * inv_l / nd;
    }
    return out;
}

inline LossValueGrad sliced_w2_loss(const PointBatch& batch, std::size_t projections, RngStream& rng) {
    return sliced_w2_loss(batch, random_projections(projections, batch.dim(), rng));
}

}  // namespace wristband
