#pragma once

// Spectral Neumann repulsion: spherical-harmonic degrees {0, 1} times K radial
// cosine modes, computed in one O(N d K) pass over the batch.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "kernel_config.hpp"
#include "pairwise.hpp"
#include "point_batch.hpp"
#include "specfun.hpp"
#include "wristband_map.hpp"

namespace wristband {

struct SpectralCoeffs {
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    std::vector<double> a;  // a_0 .. a_{K-1}
    double nu = 0.0;
    double c = 0.0;
};

struct SpectralSummary {
    std::size_t modes = 0;
    std::size_t dim = 0;
    std::vector<double> c0;  // K
    std::vector<double> c1;  // K x d, row k is c_{1,k}
};

/// Funk-Hecke eigenvalues of the chordal Gaussian for degrees 0 and 1:
///   lambda_l = Gamma(nu + 1) (2/c)^nu e^{-c} I_{nu + l}(c),  nu = (d - 2)/2, c = 2 beta alpha^2.
inline std::pair<double, double> angular_eigenvalues(std::size_t d, double beta, double alpha) {
    if (d < 3) throw UnsupportedDimension("spectral path requires d >= 3");
    const double nu = 0.5 * (static_cast<double>(d) - 2.0);
    const double c = 2.0 * beta * alpha * alpha;
    require(c > 0.0, "angular_eigenvalues: beta and alpha must be positive");
    const double log_scale = log_gamma(nu + 1.0) + nu * std::log(2.0 / c);
    const double scale = std::exp(log_scale);
    return {scale * scaled_bessel_i(nu, c), scale * scaled_bessel_i(nu + 1.0, c)};
}

/// Cosine-series coefficients of the Neumann radial kernel:
///   k_rad(t, t') = sum_k a_k cos(k pi t) cos(k pi t').
inline std::vector<double> radial_cosine_coeffs(double beta, int modes) {
    require(beta > 0.0, "radial_cosine_coeffs: beta must be positive");
    require(modes >= 1, "radial_cosine_coeffs: modes must be >= 1");
    const double base = std::sqrt(std::numbers::pi / beta);
    std::vector<double> a(static_cast<std::size_t>(modes));
    a[0] = base;
    for (int k = 1; k < modes; ++k) {
        const double kk = static_cast<double>(k);
        a[static_cast<std::size_t>(k)] = 2.0 * base * std::exp(-std::numbers::pi * std::numbers::pi * kk * kk / (4.0 * beta));
    }
    return a;
}

inline SpectralCoeffs spectral_coeffs(std::size_t d, const KernelConfig& cfg) {
    SpectralCoeffs sc;
    std::tie(sc.lambda0, sc.lambda1) = angular_eigenvalues(d, cfg.beta, cfg.alpha);
    sc.a = radial_cosine_coeffs(cfg.beta, cfg.modes);
    sc.nu = 0.5 * (static_cast<double>(d) - 2.0);
    sc.c = cfg.angular_c();
    return sc;
}

/// c0[k] = mean_i cos(k pi t_i);  c1[k] = (sqrt(d)/N) sum_i u_i cos(k pi t_i).
inline SpectralSummary spectral_summary(const WristbandBatch& wb, int modes) {
    require(modes >= 1, "spectral_summary: modes must be >= 1");
    const std::size_t kk = static_cast<std::size_t>(modes);
    const std::size_t d = wb.dim;
    SpectralSummary out;
    out.modes = kk;
    out.dim = d;
    out.c0.assign(kk, 0.0);
    out.c1.assign(kk * d, 0.0);
    std::vector<double> cosines(kk);
    for (std::size_t i = 0; i < wb.n; ++i) {
        const auto u = wb.dir(i);
        for (std::size_t k = 0; k < kk; ++k) {
            cosines[k] = k == 0 ? 1.0 : std::cos(static_cast<double>(k) * std::numbers::pi * wb.t[i]);
            out.c0[k] += cosines[k];
            double* row = out.c1.data() + k * d;
            for (std::size_t p = 0; p < d; ++p) row[p] += cosines[k] * u[p];
        }
    }
    const double inv_n = 1.0 / static_cast<double>(wb.n);
    const double c1_scale = std::sqrt(static_cast<double>(d)) * inv_n;
    for (double& v : out.c0) v *= inv_n;
    for (double& v : out.c1) v *= c1_scale;
    out.c0[0] = 1.0;
    return out;
}

/// E_sp = lambda0 sum_k a_k c0_k^2 + lambda1 sum_k a_k |c1_k|^2.
inline double spectral_energy(const SpectralSummary& summary, const SpectralCoeffs& coeffs) {
    double e0 = 0.0;
    double e1 = 0.0;
    for (std::size_t k = 0; k < summary.modes; ++k) {
        e0 += coeffs.a[k] * summary.c0[k] * summary.c0[k];
        double sq = 0.0;
        for (std::size_t p = 0; p < summary.dim; ++p) {
            const double v = summary.c1[k * summary.dim + p];
            sq += v * v;
        }
        e1 += coeffs.a[k] * sq;
    }
    return coeffs.lambda0 * e0 + coeffs.lambda1 * e1;
}

/// Spectral repulsion (1/beta) log(E_sp / (lambda0 a0) + eps) with cotangents on (u, t).
/// The energy is the V-statistic: self-pairs are kept.
inline WristbandGrad spectral_loss_wb(const WristbandBatch& wb, const KernelConfig& cfg) {
    require(wb.n >= 1, "spectral_loss: empty batch");
    const SpectralCoeffs coeffs = spectral_coeffs(wb.dim, cfg);
    const SpectralSummary summary = spectral_summary(wb, cfg.modes);
    const double energy = spectral_energy(summary, coeffs);
    const double norm = coeffs.lambda0 * coeffs.a[0];
    const double arg = energy / norm + cfg.eps;

    WristbandGrad out;
    out.value = std::log(arg) / cfg.beta;
    const double de = 1.0 / (cfg.beta * arg * norm);

    const std::size_t n = wb.n;
    const std::size_t d = wb.dim;
    const std::size_t kk = summary.modes;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double sqrt_d = std::sqrt(static_cast<double>(d));
    out.grad_u.assign(n * d, 0.0);
    out.grad_t.assign(n, 0.0);

    // dE/dc0_k = 2 lambda0 a_k c0_k, dE/dc1_k = 2 lambda1 a_k c1_k
    std::vector<double> w0(kk), w1(kk * d);
    for (std::size_t k = 0; k < kk; ++k) {
        w0[k] = 2.0 * coeffs.lambda0 * coeffs.a[k] * summary.c0[k] * de * inv_n;
        for (std::size_t p = 0; p < d; ++p)
            w1[k * d + p] = 2.0 * coeffs.lambda1 * coeffs.a[k] * summary.c1[k * d + p] * de * inv_n * sqrt_d;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto u = wb.dir(i);
        double* gu = out.grad_u.data() + i * d;
        double gt = 0.0;
        for (std::size_t k = 0; k < kk; ++k) {
            const double phase = static_cast<double>(k) * std::numbers::pi * wb.t[i];
            const double cs = k == 0 ? 1.0 : std::cos(phase);
            const double dcs = k == 0 ? 0.0 : -static_cast<double>(k) * std::numbers::pi * std::sin(phase);
            const double* w1k = w1.data() + k * d;
            double proj = 0.0;
            for (std::size_t p = 0; p < d; ++p) {
                gu[p] += w1k[p] * cs;
                proj += w1k[p] * u[p];
            }
            gt += dcs * (w0[k] + proj);
        }
        out.grad_t[i] = gt;
    }
    return out;
}

inline double spectral_loss_value(const WristbandBatch& wb, const KernelConfig& cfg) {
    const SpectralCoeffs coeffs = spectral_coeffs(wb.dim, cfg);
    const double energy = spectral_energy(spectral_summary(wb, cfg.modes), coeffs);
    return std::log(energy / (coeffs.lambda0 * coeffs.a[0]) + cfg.eps) / cfg.beta;
}

inline LossValueGrad spectral_loss(const PointBatch& batch, const KernelConfig& cfg) {
    cfg.validate();
    if (batch.dim() < 3) throw UnsupportedDimension("spectral path requires d >= 3");
    const WristbandBatch wb = wristband_forward(batch);
    WristbandGrad g = spectral_loss_wb(wb, cfg);
    return {g.value, wristband_backward(batch, wb, g.grad_u, g.grad_t)};
}

}  // namespace wristband
