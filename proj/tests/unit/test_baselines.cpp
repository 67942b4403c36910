#include <gtest/gtest.h>

#include <cmath>

#include <wristband/baselines.hpp>
#include <wristband/generators.hpp>
#include <wristband/parity.hpp>

#include "test_util.hpp"

using namespace wristband;

TEST(Mmd, NullValueWithinBiasBound) {
    const std::size_t n = 2000, d = 3;
    // V-statistic bias: sum over bandwidths of (1 - E k(y, y')) / N
    double bias = 0.0;
    for (double m : kDefaultMmdMultipliers) {
        const double s2 = m * m * d;
        bias += (1.0 - std::pow(s2 / (s2 + 2.0), 0.5 * d)) / n;
    }
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        RngStream rng(seed, "test/mmd-null");
        mean += mmd_loss(gaussian_batch(n, d, rng)).value / 4.0;
    }
    EXPECT_GT(mean, 0.0);
    EXPECT_LT(mean, 5.0 * bias);
}

TEST(Mmd, FarBatchHandValue) {
    const std::size_t n = 16, d = 4;
    PointBatch b(n, d);
    for (std::size_t i = 0; i < n; ++i) b(i, 0) = 10.0;
    double expected = 0.0;
    for (double m : kDefaultMmdMultipliers) {
        const double s2 = m * m * d;
        // all points coincide: xx term is 1, cross term is the target expectation at |x| = 10
        expected += 1.0 + std::pow(s2 / (s2 + 2.0), 0.5 * d) -
                    2.0 * std::pow(s2 / (s2 + 1.0), 0.5 * d) * std::exp(-100.0 / (2.0 * (s2 + 1.0)));
    }
    EXPECT_NEAR(mmd_loss(b).value, expected, 1e-12 * expected);
}

TEST(Mmd, GradientMatchesFiniteDifferences) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        RngStream rng(seed, "test/mmd-fd");
        const FdReport fd = finite_difference_check([](const PointBatch& x) { return mmd_loss(x); }, gaussian_batch(32, 5, rng));
        EXPECT_LE(fd.max_rel_err, 1e-5);
        EXPECT_GE(fd.cosine, 0.99999);
    }
}

TEST(SlicedW2, ZeroAtQuantiles) {
    const std::size_t n = 50;
    const auto q = gaussian_quantiles(n);
    PointBatch b(n, 2);
    for (std::size_t i = 0; i < n; ++i) b(n - 1 - i, 0) = q[i];
    EXPECT_NEAR(sliced_w2_loss(b, {{1.0, 0.0}}).value, 0.0, 1e-30);
}

TEST(SlicedW2, TwoPointHandValue) {
    const double a = 1.3;
    const PointBatch b(2, 2, {a, 0.0, -a, 0.0});
    const double z = inv_norm_cdf(0.75);
    EXPECT_NEAR(sliced_w2_loss(b, {{1.0, 0.0}}).value, 2.0 * (a - z) * (a - z) / 2.0, 1e-15);
}

TEST(SlicedW2, RotationCovariance) {
    RngStream rng(1, "test/sw-rot");
    const PointBatch b = x_batch(64, 3, rng);
    const auto proj = random_projections(8, 3, rng);
    // rotate by a permutation-and-sign orthogonal map, applied to both
    auto rot = [](std::span<const double> v) { return std::vector<double>{v[2], -v[0], v[1]}; };
    PointBatch rb(64, 3);
    for (std::size_t i = 0; i < 64; ++i) {
        const auto r = rot(b.row(i));
        std::copy(r.begin(), r.end(), rb.row(i).begin());
    }
    std::vector<std::vector<double>> rproj;
    for (const auto& p : proj) rproj.push_back(rot(p));
    EXPECT_NEAR(sliced_w2_loss(rb, rproj).value, sliced_w2_loss(b, proj).value, 1e-14);
}

TEST(SlicedW2, DeterministicAndFd) {
    RngStream a(2, "test/sw"), b(2, "test/sw");
    EXPECT_EQ(random_projections(16, 4, a), random_projections(16, 4, b));
    RngStream rng(3, "test/sw-fd");
    const auto proj = random_projections(16, 5, rng);
    const FdReport fd =
        finite_difference_check([&](const PointBatch& x) { return sliced_w2_loss(x, proj); }, gaussian_batch(32, 5, rng));
    EXPECT_LE(fd.max_rel_err, 1e-5);
    EXPECT_GE(fd.cosine, 0.99999);
}

TEST(SlicedW2, VanishesInLargeGaussianLimit) {
    RngStream rng(4, "test/sw-limit");
    const double small = sliced_w2_loss(gaussian_batch(256, 3, rng), 32, rng).value;
    const double large = sliced_w2_loss(gaussian_batch(8192, 3, rng), 32, rng).value;
    EXPECT_LT(large, small);
    EXPECT_LT(large, 5e-3);
}
