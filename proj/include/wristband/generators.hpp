#pragma once

// Seeded batch generators: Gaussian null, axis-uniform X, the radial-angular
// copula (RAC) impostor, and the four spectral-parity families.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "linalg.hpp"
#include "point_batch.hpp"
#include "rng.hpp"

namespace wristband {

inline constexpr double kRacEntropyEps = 1e-12;

inline PointBatch gaussian_batch(std::size_t n, std::size_t d, RngStream& rng) {
    require(n >= 1 && d >= 1, "gaussian_batch: n and d must be positive");
    PointBatch b(n, d);
    for (double& v : b.data()) v = rng.normal();
    return b;
}

/// One uniformly chosen axis per point, coordinate uniform on [-sqrt(3d), sqrt(3d)].
inline PointBatch x_batch(std::size_t n, std::size_t d, RngStream& rng) {
    require(n >= 1 && d >= 2, "x_batch: need n >= 1 and d >= 2");
    const double half_width = std::sqrt(3.0 * static_cast<double>(d));
    PointBatch b(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t axis = static_cast<std::size_t>(rng.below(d));
        double v;
        do v = (2.0 * rng.uniform() - 1.0) * half_width;
        while (v == 0.0);
        b(i, axis) = v;
    }
    return b;
}

/// Angular entropy score -sum_j u_j^2 log(u_j^2 + eps).
inline double angular_entropy_score(std::span<const double> u) {
    double s = 0.0;
    for (double v : u) s -= v * v * std::log(v * v + kRacEntropyEps);
    return s;
}

/// Uniform directions and chi_d radii drawn independently, then re-paired rankwise
/// so the smallest radius goes to the smallest entropy score. Both empirical
/// marginals are untouched; the copula becomes comonotone.
inline PointBatch rac_batch(std::size_t n, std::size_t d, RngStream& rng) {
    require(n >= 1 && d >= 2, "rac_batch: need n >= 1 and d >= 2");
    PointBatch dirs = gaussian_batch(n, d, rng);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = dirs.row(i);
        const double r = norm(row);
        for (double& v : row) v /= r;
    }
    std::vector<double> radii(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double z = rng.normal();
            s += z * z;
        }
        radii[i] = std::sqrt(s);
    }
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = angular_entropy_score(dirs.row(i));

    std::vector<std::size_t> by_score(n);
    for (std::size_t i = 0; i < n; ++i) by_score[i] = i;
    std::stable_sort(by_score.begin(), by_score.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::sort(radii.begin(), radii.end());

    PointBatch out(n, d);
    for (std::size_t rank = 0; rank < n; ++rank) {
        const std::size_t i = by_score[rank];
        const auto u = dirs.row(i);
        auto x = out.row(i);
        for (std::size_t k = 0; k < d; ++k) x[k] = radii[rank] * u[k];
    }
    return out;
}

/// Zero mean and identity (1/N) sample covariance via the inverse symmetric square root.
inline PointBatch whiten(const PointBatch& batch) {
    require(batch.n() >= 2, "whiten: need at least two points");
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    batch_moments(batch, mean, cov);
    const SymmetricEigen e = symmetric_eigen(cov);
    const double top = e.values[0];
    const double bottom = e.values[e.values.size() - 1];
    if (!(bottom > 1e-12 * std::max(top, 1e-300))) throw ContractViolation("whiten: covariance is rank deficient");
    const Eigen::VectorXd inv_sqrt = e.values.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd w = e.vectors * inv_sqrt.asDiagonal() * e.vectors.transpose();

    const std::size_t n = batch.n();
    const std::size_t d = batch.dim();
    PointBatch out(n, d);
    Eigen::VectorXd centered(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = batch.row(i);
        for (std::size_t k = 0; k < d; ++k) centered[static_cast<Eigen::Index>(k)] = x[k] - mean[static_cast<Eigen::Index>(k)];
        const Eigen::VectorXd y = w * centered;
        auto o = out.row(i);
        for (std::size_t k = 0; k < d; ++k) o[k] = y[static_cast<Eigen::Index>(k)];
    }
    // remove the rounding residue of the mean so it is zero to machine precision
    for (std::size_t k = 0; k < d; ++k) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += out(i, k);
        m /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) out(i, k) -= m;
    }
    return out;
}

/// Coordinatewise z-scoring (1/N variance).
inline PointBatch standardize(const PointBatch& batch) {
    const std::size_t n = batch.n();
    const std::size_t d = batch.dim();
    PointBatch out = batch;
    for (std::size_t k = 0; k < d; ++k) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += batch(i, k);
        m /= static_cast<double>(n);
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) v += (batch(i, k) - m) * (batch(i, k) - m);
        const double sd = std::sqrt(v / static_cast<double>(n));
        require(sd > 0.0, "standardize: constant coordinate");
        for (std::size_t i = 0; i < n; ++i) out(i, k) = (batch(i, k) - m) / sd;
    }
    return out;
}

enum class ParityKind { mixture5, two_mode, student_t, ring };

inline std::string to_string(ParityKind k) {
    switch (k) {
        case ParityKind::mixture5: return "mixture5";
        case ParityKind::two_mode: return "two-mode";
        case ParityKind::student_t: return "student-t";
        case ParityKind::ring: return "ring";
    }
    return "?";
}

inline ParityKind parse_parity_kind(std::string_view s) {
    if (s == "mixture5") return ParityKind::mixture5;
    if (s == "two-mode" || s == "two_mode") return ParityKind::two_mode;
    if (s == "student-t" || s == "student_t") return ParityKind::student_t;
    if (s == "ring") return ParityKind::ring;
    throw ContractViolation("unknown parity generator '" + std::string(s) + "'");
}

inline constexpr ParityKind kAllParityKinds[] = {ParityKind::mixture5, ParityKind::two_mode, ParityKind::student_t,
                                                 ParityKind::ring};

/// Free constants of the parity families. Shared structure (mixture means, ring
/// directions) comes from a fixed stream so it does not change with the batch seed.
struct ParityConstants {
    static constexpr std::uint64_t kStructureSeed = 0x57a1b0d5ULL;
    static constexpr int kMixtureComponents = 5;
    static constexpr double kMixtureMeanVariance = 2.0;
    static constexpr double kTwoModeOffset = 2.0;
    static constexpr double kTwoModeNoise = 1.0;
    static constexpr double kStudentDof = 3.0;
    static constexpr int kRingModes = 4;
    static constexpr double kRingAngularSpread = 0.35;  // per-coordinate noise, scaled by 1/sqrt(d)
    static constexpr double kRingRadialSpread = 0.05;   // relative radius noise
};

namespace generator_detail {

inline std::vector<std::vector<double>> structure_vectors(std::string_view what, std::size_t count, std::size_t d,
                                                          double scale, bool unit) {
    RngStream rng(ParityConstants::kStructureSeed, std::string("parity-structure/") + std::string(what) + "/" +
                                                       std::to_string(d));
    std::vector<std::vector<double>> out(count, std::vector<double>(d));
    for (auto& v : out) {
        for (double& x : v) x = scale * rng.normal();
        if (unit) {
            const double r = norm(v);
            for (double& x : v) x /= r;
        }
    }
    return out;
}

}  // namespace generator_detail

inline PointBatch parity_batch(ParityKind kind, std::size_t n, std::size_t d, RngStream& rng) {
    require(d >= 1 && n >= 2 * d, "parity_batch: need n >= 2d for whitening");
    using C = ParityConstants;
    PointBatch b(n, d);
    switch (kind) {
        case ParityKind::mixture5: {
            const auto means = generator_detail::structure_vectors("mixture5", C::kMixtureComponents, d,
                                                                   std::sqrt(C::kMixtureMeanVariance), false);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& mu = means[rng.below(C::kMixtureComponents)];
                for (std::size_t k = 0; k < d; ++k) b(i, k) = mu[k] + rng.normal();
            }
            return standardize(b);
        }
        case ParityKind::two_mode: {
            for (std::size_t i = 0; i < n; ++i) {
                const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
                for (std::size_t k = 0; k < d; ++k) b(i, k) = C::kTwoModeNoise * rng.normal();
                b(i, 0) += sign * C::kTwoModeOffset;
            }
            return b;
        }
        case ParityKind::student_t: {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < d; ++k) {
                    double chi2 = 0.0;
                    for (int j = 0; j < static_cast<int>(C::kStudentDof); ++j) {
                        const double z = rng.normal();
                        chi2 += z * z;
                    }
                    b(i, k) = rng.normal() / std::sqrt(chi2 / C::kStudentDof);
                }
            }
            return whiten(b);
        }
        case ParityKind::ring: {
            const auto modes = generator_detail::structure_vectors("ring", C::kRingModes, d, 1.0, true);
            const double base_radius = std::sqrt(static_cast<double>(d));
            const double spread = C::kRingAngularSpread / std::sqrt(static_cast<double>(d));
            std::vector<double> v(d);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& m = modes[rng.below(C::kRingModes)];
                for (std::size_t k = 0; k < d; ++k) v[k] = m[k] + spread * rng.normal();
                const double r = norm(v);
                const double radius = base_radius * (1.0 + C::kRingRadialSpread * rng.normal());
                for (std::size_t k = 0; k < d; ++k) b(i, k) = radius * v[k] / r;
            }
            return whiten(b);
        }
    }
    return b;
}

}  // namespace wristband
