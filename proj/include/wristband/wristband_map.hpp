#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "point_batch.hpp"
#include "specfun.hpp"

namespace wristband {

/// Points with norm below this are clamped: direction e_1, flagged, zero gradient.
inline constexpr double kNormFloor = 1e-12;

/// Wristband coordinates of a batch: directions u (N x d), radial quantiles t,
/// squared norms s, and the floor flags.
struct WristbandBatch {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<double> u;
    std::vector<double> t;
    std::vector<double> s;
    std::vector<bool> norm_floored;

    std::span<const double> dir(std::size_t i) const noexcept { return {u.data() + i * dim, dim}; }
};

inline WristbandBatch wristband_forward(const PointBatch& batch) {
    const std::size_t n = batch.n();
    const std::size_t d = batch.dim();
    require(d >= 2, "wristband_forward: dimension must be >= 2");

    WristbandBatch wb;
    wb.n = n;
    wb.dim = d;
    wb.u.assign(n * d, 0.0);
    wb.t.resize(n);
    wb.s.resize(n);
    wb.norm_floored.assign(n, false);

    for (std::size_t i = 0; i < n; ++i) {
        const auto x = batch.row(i);
        const double s = dot(x, x);
        const double r = std::sqrt(s);
        double* u = wb.u.data() + i * d;
        if (r < kNormFloor) {
            wb.norm_floored[i] = true;
            u[0] = 1.0;
            wb.s[i] = kNormFloor * kNormFloor;
        } else {
            for (std::size_t k = 0; k < d; ++k) u[k] = x[k] / r;
            wb.s[i] = s;
        }
        wb.t[i] = chi2_cdf(static_cast<int>(d), wb.s[i]);
    }
    return wb;
}

/// Pulls cotangents on (u, t) back to the raw points:
///   dt/dx = chi2_pdf(d, s) * 2x,  du/dx = (I - u u^T) / |x|.
inline std::vector<double> wristband_backward(const PointBatch& batch, const WristbandBatch& wb,
                                              std::span<const double> grad_u, std::span<const double> grad_t) {
    const std::size_t n = batch.n();
    const std::size_t d = batch.dim();
    require(wb.n == n && wb.dim == d, "wristband_backward: wristband batch does not match points");
    require(grad_u.size() == n * d, "wristband_backward: grad_u has wrong length");
    require(grad_t.size() == n, "wristband_backward: grad_t has wrong length");

    std::vector<double> grad(n * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (wb.norm_floored[i]) continue;
        const auto x = batch.row(i);
        const auto u = wb.dir(i);
        const double r = std::sqrt(wb.s[i]);
        const std::span<const double> gu = grad_u.subspan(i * d, d);
        const double radial = grad_t[i] == 0.0 ? 0.0 : grad_t[i] * 2.0 * chi2_pdf(static_cast<int>(d), wb.s[i]);
        const double proj = dot(u, gu);
        double* g = grad.data() + i * d;
        for (std::size_t k = 0; k < d; ++k) g[k] = radial * x[k] + (gu[k] - proj * u[k]) / r;
    }
    return grad;
}

}  // namespace wristband
