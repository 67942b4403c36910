#include <gtest/gtest.h>

#include <cmath>

#include <wristband/generators.hpp>
#include <wristband/pairwise.hpp>
#include <wristband/parity.hpp>

#include "test_util.hpp"

using namespace wristband;

namespace {

// A d=2 point whose wristband t is exactly 1/2.
PointBatch median_points(std::size_t n) {
    PointBatch b(n, 2);
    for (std::size_t i = 0; i < n; ++i) b(i, 0) = std::sqrt(2.0 * std::log(2.0));
    return b;
}

}  // namespace

TEST(AngularKernel, Identities) {
    KernelConfig cfg;
    cfg.beta = 8.0;
    cfg.alpha = 0.8;
    const std::vector<double> u{0.0, 1.0, 0.0}, v{0.0, -1.0, 0.0};
    EXPECT_EQ(angular_kernel(u, u, cfg), 1.0);
    EXPECT_NEAR(angular_kernel(u, v, cfg), std::exp(-20.48), 1e-22);
}

TEST(AngularKernel, BothAlgebraicFormsAgree) {
    KernelConfig cfg;
    cfg.beta = 8.0;
    cfg.alpha = 0.8;
    RngStream rng(1, "test/angular-forms");
    const WristbandBatch wb = wristband_forward(gaussian_batch(2000, 6, rng));
    for (std::size_t i = 0; i < 1000; ++i) {
        const auto a = wb.dir(2 * i), b = wb.dir(2 * i + 1);
        const double alt = std::exp(-2.0 * cfg.beta * cfg.alpha * cfg.alpha) *
                           std::exp(2.0 * cfg.beta * cfg.alpha * cfg.alpha * dot(a, b));
        EXPECT_NEAR(angular_kernel(a, b, cfg), alt, 1e-12);
    }
}

TEST(RadialImageKernel, HandValues) {
    EXPECT_NEAR(radial_image_kernel(0.0, 0.0, 8.0), 2.0 + std::exp(-32.0), 1e-15);
    EXPECT_NEAR(radial_image_kernel(0.5, 0.5, 8.0), 1.0 + 2.0 * std::exp(-8.0), 1e-15);
    RngStream rng(2, "test/radial-sym");
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(), b = rng.uniform();
        EXPECT_EQ(radial_image_kernel(a, b, 8.0), radial_image_kernel(b, a, 8.0));
    }
}

TEST(RadialNeumannKernel, OneImageGapWithinBound) {
    double gap = 0.0;
    for (int i = 0; i <= 200; ++i)
        for (int j = 0; j <= 200; ++j) {
            const double t = i / 200.0, t2 = j / 200.0;
            gap = std::max(gap, std::fabs(radial_neumann_kernel(t, t2, 8.0, 1) - radial_image_kernel(t, t2, 8.0)));
        }
    EXPECT_LE(gap, 3.4e-4);
}

TEST(RadialNeumannKernel, TailConverged) {
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const double t = i / 20.0, t2 = j / 20.0;
            EXPECT_NEAR(radial_neumann_kernel(t, t2, 4.0, 10), radial_neumann_kernel(t, t2, 4.0, 20), 1e-14);
        }
}

TEST(PairwiseRepulsion, SinglePointHandValue) {
    KernelConfig cfg;
    cfg.beta = 8.0;
    const WristbandBatch wb = wristband_forward(median_points(1));
    ASSERT_NEAR(wb.t[0], 0.5, 1e-15);
    EXPECT_NEAR(pairwise_repulsion_value(wb, cfg), -1.0, 1e-9);
    cfg.reduction = Reduction::per_point;
    EXPECT_NEAR(pairwise_repulsion_value(wb, cfg), -1.0, 1e-9);
}

TEST(PairwiseRepulsion, TwoCoincidentPointsHandValue) {
    KernelConfig cfg;
    cfg.beta = 8.0;
    const double r = 1.0 + 2.0 * std::exp(-8.0);
    const double expected = std::log((4.0 * r - 2.0) / 10.0 + cfg.eps) / 8.0;
    EXPECT_NEAR(pairwise_repulsion_loss(median_points(2), cfg).value, expected, 1e-12);
}

TEST(PairwiseRepulsion, GaussianNullMeanNearReference) {
    const KernelConfig cfg = calibration_reference_config();
    RngStream rng(3, "test/pairwise-null");
    const double v = pairwise_repulsion_loss(gaussian_batch(1024, 8, rng), cfg).value;
    EXPECT_NEAR(v, -0.3486, 3 * 0.0186);
}

TEST(PairwiseRepulsion, KernelBounds) {
    KernelConfig cfg;
    RngStream rng(4, "test/kernel-bounds");
    const WristbandBatch wb = wristband_forward(gaussian_batch(64, 4, rng));
    for (std::size_t i = 0; i < wb.n; ++i) {
        EXPECT_GE(angular_kernel(wb.dir(i), wb.dir(i), cfg) * radial_image_kernel(wb.t[i], wb.t[i], cfg.beta), 1.0);
        for (std::size_t j = 0; j < wb.n; ++j) {
            const double k = angular_kernel(wb.dir(i), wb.dir(j), cfg) * radial_image_kernel(wb.t[i], wb.t[j], cfg.beta);
            EXPECT_GT(k, 0.0);
            EXPECT_LE(k, 3.0);
        }
    }
}

TEST(PairwiseRepulsion, RotationAndPermutationInvariant) {
    for (Reduction red : {Reduction::global, Reduction::per_point}) {
        KernelConfig cfg;
        cfg.reduction = red;
        RngStream rng(5, "test/pairwise-invariance");
        const PointBatch b = gaussian_batch(100, 5, rng);
        const double v = pairwise_repulsion_loss(b, cfg).value;
        EXPECT_NEAR(pairwise_repulsion_loss(wbtest::random_orthogonal_apply(b, rng), cfg).value, v, 1e-10);
        EXPECT_NEAR(pairwise_repulsion_loss(wbtest::reversed_rows(b), cfg).value, v, 1e-12);
    }
}

TEST(PairwiseRepulsion, GradientMatchesFiniteDifferences) {
    for (Reduction red : {Reduction::global, Reduction::per_point})
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            KernelConfig cfg;
            cfg.reduction = red;
            RngStream rng(seed, "test/pairwise-fd");
            const FdReport r = finite_difference_check(
                [&](const PointBatch& x) { return pairwise_repulsion_loss(x, cfg); }, gaussian_batch(16, 5, rng));
            EXPECT_LE(r.max_rel_err, 1e-5) << to_string(red);
            EXPECT_LE(r.rel_l2_err, 1e-5);
            EXPECT_GE(r.cosine, 0.99999);
        }
}

TEST(PairwiseRepulsion, ValueAgreesWithValueGradPath) {
    KernelConfig cfg;
    cfg.reduction = Reduction::per_point;
    RngStream rng(6, "test/pairwise-paths");
    const PointBatch b = gaussian_batch(40, 3, rng);
    EXPECT_NEAR(pairwise_repulsion_value(wristband_forward(b), cfg), pairwise_repulsion_loss(b, cfg).value, 1e-13);
}

TEST(KernelEnergy, UniformBeatsRadiallyDistortedSmallScale) {
    KernelConfig cfg;
    cfg.beta = 8.0;
    int wins = 0;
    const int trials = 20;
    for (int trial = 0; trial < trials; ++trial) {
        RngStream rng(trial, "test/energy");
        const PointBatch g = gaussian_batch(256, 3, rng);
        WristbandBatch wb = wristband_forward(g);
        for (std::size_t i = 0; i < wb.n; ++i) wb.t[i] = rng.uniform();
        const double e_uniform = kernel_energy(wb, cfg);
        for (double& t : wb.t) t = t * t;
        wins += kernel_energy(wb, cfg) > e_uniform;
    }
    EXPECT_EQ(wins, trials);
}
