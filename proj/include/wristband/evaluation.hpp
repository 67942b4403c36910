#pragma once

// Calibrated barycentric W2: a Gaussian reference batch built by recursive exact
// matching and midpoint averaging, and z-scores of a candidate's exact W2 to it
// against fresh Gaussian batches of the same shape.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "generators.hpp"
#include "hungarian.hpp"
#include "parallel.hpp"
#include "point_batch.hpp"
#include "rng.hpp"

namespace wristband {

inline std::vector<double> squared_distance_matrix(const PointBatch& a, const PointBatch& b) {
    require(a.n() == b.n() && a.dim() == b.dim(), "squared_distance_matrix: shape mismatch");
    const std::size_t n = a.n();
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = a.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            const auto y = b.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) {
                const double diff = x[k] - y[k];
                s += diff * diff;
            }
            cost[i * n + j] = s;
        }
    }
    return cost;
}

/// Optimal matching between two equal-size batches under squared Euclidean cost.
inline Assignment match_batches(const PointBatch& a, const PointBatch& b) {
    return hungarian_assign(squared_distance_matrix(a, b), a.n());
}

/// Exact equal-weight W2 distance.
inline double w2_exact(const PointBatch& a, const PointBatch& b) {
    require(a.n() == b.n() && a.dim() == b.dim(), "w2_exact: shape mismatch");
    require(a.n() >= 1, "w2_exact: empty batch");
    const Assignment m = match_batches(a, b);
    return std::sqrt(std::max(0.0, m.cost) / static_cast<double>(a.n()));
}

struct ReferenceProvenance {
    std::size_t num_batches = 0;
    std::size_t n = 0;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::size_t depth = 0;
};

struct BarycentricReference {
    PointBatch batch;
    ReferenceProvenance provenance;
};

/// Recursive pairwise Hungarian midpoint averaging of `num_batches` Gaussian batches.
/// Source batch k comes from stream "reference/batch/<k>"; level l shuffles the
/// surviving indices with "reference/pairing/<l>" and pairs neighbours.
inline BarycentricReference barycentric_reference(std::size_t n, std::size_t d, std::size_t num_batches,
                                                  std::uint64_t seed, unsigned threads = 1) {
    require(num_batches >= 2 && (num_batches & (num_batches - 1)) == 0,
            "barycentric_reference: num_batches must be a power of two >= 2");
    const RngStream root(seed, "reference");
    std::vector<PointBatch> level(num_batches);
    for (std::size_t k = 0; k < num_batches; ++k) {
        RngStream rng = root.child("batch").child(k);
        level[k] = gaussian_batch(n, d, rng);
    }
    std::size_t depth = 0;
    while (level.size() > 1) {
        std::vector<std::size_t> order(level.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        RngStream pairing = root.child("pairing").child(depth);
        pairing.shuffle(order);
        std::vector<PointBatch> next(level.size() / 2);
        parallel_for(next.size(), threads, [&](std::size_t p) {
            const PointBatch& a = level[order[2 * p]];
            const PointBatch& b = level[order[2 * p + 1]];
            const Assignment m = match_batches(a, b);
            PointBatch mid(n, d);
            for (std::size_t i = 0; i < n; ++i) {
                const auto x = a.row(i);
                const auto y = b.row(m.perm[i]);
                auto o = mid.row(i);
                for (std::size_t k = 0; k < d; ++k) o[k] = 0.5 * (x[k] + y[k]);
            }
            next[p] = std::move(mid);
        });
        level = std::move(next);
        ++depth;
    }
    return {std::move(level.front()), {num_batches, n, d, seed, depth}};
}

/// W2 distances of fresh Gaussian batches (stream "null/<k>" under seed) to the reference.
struct NullDistribution {
    std::vector<double> distances;
    double mean = 0.0;
    double sd = 0.0;  // (n - 1) estimator
    std::uint64_t seed = 0;
};

inline NullDistribution null_distribution(const BarycentricReference& ref, std::size_t null_batches,
                                          std::uint64_t seed, unsigned threads = 1) {
    require(null_batches >= 2, "null_distribution: need at least two null batches");
    const std::size_t n = ref.batch.n();
    const std::size_t d = ref.batch.dim();
    const RngStream root(seed, "null");
    NullDistribution nd;
    nd.seed = seed;
    nd.distances.resize(null_batches);
    parallel_for(null_batches, threads, [&](std::size_t k) {
        RngStream rng = root.child(k);
        nd.distances[k] = w2_exact(gaussian_batch(n, d, rng), ref.batch);
    });
    for (double v : nd.distances) nd.mean += v;
    nd.mean /= static_cast<double>(null_batches);
    double ss = 0.0;
    for (double v : nd.distances) ss += (v - nd.mean) * (v - nd.mean);
    nd.sd = std::sqrt(ss / static_cast<double>(null_batches - 1));
    if (!(nd.sd > 0.0)) throw CalibrationError("null_distribution: zero spread of null W2 distances");
    return nd;
}

struct BarycentricScore {
    double z = 0.0;
    double w2 = 0.0;
    double null_mean = 0.0;
    double null_sd = 0.0;
};

inline BarycentricScore score_against(const PointBatch& candidate, const BarycentricReference& ref,
                                      const NullDistribution& null) {
    require(candidate.n() == ref.batch.n() && candidate.dim() == ref.batch.dim(),
            "barycentric score: candidate shape does not match reference");
    BarycentricScore s;
    s.w2 = w2_exact(candidate, ref.batch);
    s.null_mean = null.mean;
    s.null_sd = null.sd;
    s.z = (s.w2 - null.mean) / null.sd;
    return s;
}

/// z = (W2(candidate, ref) - mean_k W2(g_k, ref)) / sd_k W2(g_k, ref), g_k fresh Gaussian.
inline double barycentric_z_score(const PointBatch& candidate, const BarycentricReference& ref,
                                  std::size_t null_batches, std::uint64_t seed, unsigned threads = 1) {
    return score_against(candidate, ref, null_distribution(ref, null_batches, seed, threads)).z;
}

}  // namespace wristband
