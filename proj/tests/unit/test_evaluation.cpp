#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <wristband/evaluation.hpp>
#include <wristband/generators.hpp>
#include <wristband/linalg.hpp>

using namespace wristband;

namespace {

double brute_force_min(const std::vector<double>& cost, std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = INFINITY;
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += cost[i * n + perm[i]];
        best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

bool is_permutation_of_range(std::vector<std::size_t> p) {
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != i) return false;
    return true;
}

}  // namespace

TEST(Hungarian, TrivialCases) {
    const Assignment a = hungarian_assign(std::vector<double>{0, 9, 9, 0}, 2);
    EXPECT_EQ(a.perm, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(a.cost, 0.0);
    const Assignment e = hungarian_assign(std::vector<double>(16, 2.5), 4);
    EXPECT_EQ(e.cost, 10.0);
    EXPECT_TRUE(is_permutation_of_range(e.perm));
}

TEST(Hungarian, MatchesBruteForce) {
    RngStream rng(1, "test/hungarian-brute");
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> cost(49);
        for (double& c : cost) c = trial % 2 ? rng.uniform() : std::floor(10.0 * rng.uniform());
        const Assignment a = hungarian_assign(cost, 7);
        EXPECT_TRUE(is_permutation_of_range(a.perm));
        EXPECT_NEAR(a.cost, brute_force_min(cost, 7), 1e-12);
        double sum = 0.0;
        for (std::size_t i = 0; i < 7; ++i) sum += cost[i * 7 + a.perm[i]];
        EXPECT_NEAR(a.cost, sum, 1e-9);
    }
}

TEST(Hungarian, BeatsRandomPermutations) {
    RngStream rng(2, "test/hungarian-random");
    const std::size_t n = 40;
    std::vector<double> cost(n * n);
    for (double& c : cost) c = rng.normal() * rng.normal();
    const double best = hungarian_assign(cost, n).cost;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (int k = 0; k < 1000; ++k) {
        rng.shuffle(perm);
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += cost[i * n + perm[i]];
        ASSERT_LE(best, c + 1e-12);
    }
}

TEST(Hungarian, NonFiniteIsError) {
    std::vector<double> cost{0, 1, INFINITY, 0};
    EXPECT_THROW(hungarian_assign(cost, 2), ContractViolation);
    EXPECT_THROW(hungarian_assign(std::vector<double>(3), 2), ContractViolation);
}

TEST(W2Exact, Identities) {
    RngStream rng(3, "test/w2");
    const PointBatch a = gaussian_batch(30, 3, rng);
    EXPECT_EQ(w2_exact(a, a), 0.0);
    PointBatch shifted = a;
    const double v[3] = {0.3, -1.2, 0.5};
    for (std::size_t i = 0; i < a.n(); ++i)
        for (std::size_t k = 0; k < 3; ++k) shifted(i, k) += v[k];
    EXPECT_NEAR(w2_exact(a, shifted), std::sqrt(0.09 + 1.44 + 0.25), 1e-9);
    EXPECT_THROW(w2_exact(a, gaussian_batch(29, 3, rng)), ContractViolation);
}

TEST(W2Exact, SmallBruteForce) {
    RngStream rng(4, "test/w2-brute");
    const PointBatch a = gaussian_batch(6, 2, rng), b = gaussian_batch(6, 2, rng);
    EXPECT_NEAR(w2_exact(a, b), std::sqrt(brute_force_min(squared_distance_matrix(a, b), 6) / 6.0), 1e-12);
}

TEST(W2Exact, MetricProperties) {
    RngStream rng(5, "test/w2-metric");
    for (int k = 0; k < 10; ++k) {
        const PointBatch a = gaussian_batch(20, 2, rng), b = gaussian_batch(20, 2, rng), c = x_batch(20, 2, rng);
        EXPECT_NEAR(w2_exact(a, b), w2_exact(b, a), 1e-9);
        EXPECT_LE(w2_exact(a, c), w2_exact(a, b) + w2_exact(b, c) + 1e-9);
    }
}

TEST(BarycentricReference, ProvenanceAndDeterminism) {
    const BarycentricReference r = barycentric_reference(32, 2, 8, 11);
    EXPECT_EQ(r.provenance.depth, 3u);
    EXPECT_EQ(r.provenance.num_batches, 8u);
    EXPECT_EQ(r.provenance.seed, 11u);
    EXPECT_EQ(r.batch, barycentric_reference(32, 2, 8, 11, 3).batch);
    EXPECT_THROW(barycentric_reference(32, 2, 6, 11), ContractViolation);
}

TEST(BarycentricReference, IdenticalPairGivesThatBatch) {
    RngStream rng(6, "test/identical");
    const PointBatch g = gaussian_batch(16, 3, rng);
    const Assignment m = match_batches(g, g);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(m.perm[i], i);
    PointBatch mid(16, 3);
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t k = 0; k < 3; ++k) mid(i, k) = 0.5 * (g(i, k) + g(m.perm[i], k));
    EXPECT_EQ(mid, g);
}

TEST(BarycentricReference, CovarianceCloserToIdentity) {
    int closer = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t n = 64, d = 2, k = 8;
        const BarycentricReference r = barycentric_reference(n, d, k, seed);
        auto frob = [&](const PointBatch& b) {
            Eigen::VectorXd m;
            Eigen::MatrixXd c;
            batch_moments(b, m, c);
            return (c - Eigen::MatrixXd::Identity(d, d)).norm();
        };
        std::vector<double> source;
        const RngStream root(seed, "reference");
        for (std::size_t j = 0; j < k; ++j) {
            RngStream rng = root.child("batch").child(j);
            source.push_back(frob(gaussian_batch(n, d, rng)));
        }
        std::sort(source.begin(), source.end());
        closer += frob(r.batch) < 0.5 * (source[3] + source[4]);
    }
    EXPECT_GE(closer, 15);
}

TEST(BarycentricScore, NullConsistencyAndExtremes) {
    const BarycentricReference ref = barycentric_reference(64, 2, 8, 1);
    const NullDistribution null = null_distribution(ref, 64, 2);
    EXPECT_EQ(null.distances.size(), 64u);
    int inside = 0;
    const RngStream held(77, "held-out");
    for (std::size_t k = 0; k < 20; ++k) {
        RngStream rng = held.child(k);
        const double z = score_against(gaussian_batch(64, 2, rng), ref, null).z;
        inside += std::fabs(z) <= 3.0;
    }
    EXPECT_GE(inside, 19);
    EXPECT_LT(score_against(ref.batch, ref, null).z, 0.0);
    RngStream xr(3, "test/x-score");
    EXPECT_GT(score_against(x_batch(64, 2, xr), ref, null).z, 3.0);
}

TEST(BarycentricScore, DeterministicAcrossThreads) {
    const BarycentricReference ref = barycentric_reference(32, 2, 4, 5);
    RngStream rng(8, "test/cand");
    const PointBatch c = x_batch(32, 2, rng);
    EXPECT_EQ(barycentric_z_score(c, ref, 16, 9, 1), barycentric_z_score(c, ref, 16, 9, 4));
}
