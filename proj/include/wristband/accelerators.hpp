#pragma once

// Finite-sample accelerators that share the Gaussian optimum: the 1-D radial
// Wasserstein term on the quantiles t, and the Gaussian-fit W2 moment term.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "linalg.hpp"
#include "pairwise.hpp"
#include "point_batch.hpp"
#include "wristband_map.hpp"

namespace wristband {

inline constexpr double kEigenClamp = 1e-9;

struct MomentSummary {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::VectorXd eigvals;
    Eigen::MatrixXd eigvecs;
};

inline MomentSummary moment_summary(const PointBatch& batch) {
    MomentSummary m;
    batch_moments(batch, m.mean, m.cov);
    SymmetricEigen e = symmetric_eigen(m.cov);
    m.eigvals = std::move(e.values);
    m.eigvecs = std::move(e.vectors);
    return m;
}

/// Indices that sort t ascending; ties broken by index.
inline std::vector<std::size_t> sort_permutation(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    return order;
}

/// (1/N) sum_i (t_(i) - (i - 1/2)/N)^2 with the cotangent on t routed through the sort.
inline WristbandGrad radial_w2_wb(const WristbandBatch& wb) {
    require(wb.n >= 1, "radial_w2_loss: empty batch");
    const std::size_t n = wb.n;
    const double nd = static_cast<double>(n);
    const std::vector<std::size_t> order = sort_permutation(wb.t);
    WristbandGrad out;
    out.grad_u.assign(n * wb.dim, 0.0);
    out.grad_t.assign(n, 0.0);
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double diff = wb.t[order[r]] - (static_cast<double>(r) + 0.5) / nd;
        acc += diff * diff;
        out.grad_t[order[r]] = 2.0 * diff / nd;
    }
    out.value = acc / nd;
    return out;
}

inline LossValueGrad radial_w2_loss(const PointBatch& batch) {
    const WristbandBatch wb = wristband_forward(batch);
    WristbandGrad g = radial_w2_wb(wb);
    return {g.value, wristband_backward(batch, wb, g.grad_u, g.grad_t)};
}

inline double radial_w2_value(const WristbandBatch& wb) {
    std::vector<double> t = wb.t;
    std::sort(t.begin(), t.end());
    const double nd = static_cast<double>(t.size());
    double acc = 0.0;
    for (std::size_t r = 0; r < t.size(); ++r) {
        const double diff = t[r] - (static_cast<double>(r) + 0.5) / nd;
        acc += diff * diff;
    }
    return acc / nd;
}

inline double moment_w2_from(const MomentSummary& m) {
    double v = m.mean.squaredNorm();
    for (Eigen::Index i = 0; i < m.eigvals.size(); ++i) {
        const double root = std::sqrt(std::max(m.eigvals[i], kEigenClamp));
        v += (root - 1.0) * (root - 1.0);
    }
    return v;
}

inline double moment_w2_value(const PointBatch& batch) {
    require(batch.n() >= 2, "moment_w2_loss: need at least two points");
    return moment_w2_from(moment_summary(batch));
}

/// |mu|^2 + sum_i (sqrt(lambda_i) - 1)^2 over the biased covariance spectrum.
///
/// The eigenvalue term is a spectral function of the covariance, so its gradient
/// with respect to the covariance is V diag(1 - lambda^{-1/2}) V^T (clamped lambda)
/// and no eigenvector derivative appears, even for repeated eigenvalues.
inline LossValueGrad moment_w2_loss(const PointBatch& batch) {
    require(batch.n() >= 2, "moment_w2_loss: need at least two points");
    const std::size_t n = batch.n();
    const std::size_t d = batch.dim();
    const MomentSummary m = moment_summary(batch);

    Eigen::VectorXd dg(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < dg.size(); ++i) dg[i] = 1.0 - 1.0 / std::sqrt(std::max(m.eigvals[i], kEigenClamp));
    const Eigen::MatrixXd g_cov = m.eigvecs * dg.asDiagonal() * m.eigvecs.transpose();

    LossValueGrad out;
    out.value = moment_w2_from(m);
    out.grad.assign(n * d, 0.0);
    const double inv_n = 1.0 / static_cast<double>(n);
    const Eigen::VectorXd mean_term = 2.0 * inv_n * m.mean;
    Eigen::VectorXd centered(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = batch.row(i);
        for (std::size_t k = 0; k < d; ++k) centered[static_cast<Eigen::Index>(k)] = x[k] - m.mean[static_cast<Eigen::Index>(k)];
        const Eigen::VectorXd g = mean_term + 2.0 * inv_n * (g_cov * centered);
        for (std::size_t k = 0; k < d; ++k) out.grad[i * d + k] = g[static_cast<Eigen::Index>(k)];
    }
    return out;
}

}  // namespace wristband
