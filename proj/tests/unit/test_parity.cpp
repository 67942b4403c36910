#include <gtest/gtest.h>

#include <cmath>

#include <wristband/accelerators.hpp>
#include <wristband/generators.hpp>
#include <wristband/parity.hpp>

using namespace wristband;

TEST(GradientCosine, IdenticalPointsAreParallel) {
    PointBatch b(16, 4);
    for (std::size_t i = 0; i < 16; ++i) {
        b(i, 0) = 1.0;
        b(i, 2) = 0.5;
    }
    const GradientComparison g = gradient_cosine(b, calibration_reference_config(), 3);
    EXPECT_NEAR(g.cosine, 1.0, 1e-9);
}

TEST(GradientCosine, RequiresD3) {
    RngStream rng(1, "test/cos-d2");
    EXPECT_THROW(gradient_cosine(gaussian_batch(16, 2, rng), KernelConfig{}, 3), UnsupportedDimension);
}

TEST(ParityStudy, SmallScaleGradientsAlign) {
    const ParitySummary s = parity_study(16, 256, 3, 2, calibration_reference_config());
    EXPECT_EQ(s.rows.size(), 8u);
    EXPECT_GE(s.mean_cosine, 0.9);
    EXPECT_LE(s.min_cosine, s.mean_cosine);
    const ParitySummary again = parity_study(16, 256, 3, 2, calibration_reference_config());
    EXPECT_EQ(s.mean_cosine, again.mean_cosine);
    EXPECT_EQ(s.value_correlation, again.value_correlation);
}

TEST(TimingSweep, ProducesRowsPerCell) {
    const auto rows = timing_sweep({4, 8}, {64, 128}, 3, 2, KernelConfig{});
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[1].dim, 4u);
    EXPECT_EQ(rows[1].n, 128u);
    for (const auto& r : rows) {
        EXPECT_GT(r.pairwise_ms, 0.0);
        EXPECT_GT(r.spectral_ms, 0.0);
    }
}

TEST(FiniteDifference, DetectsWrongGradient) {
    RngStream rng(2, "test/fd-wrong");
    const FdReport bad = finite_difference_check(
        [](const PointBatch& x) {
            LossValueGrad r = radial_w2_loss(x);
            for (double& g : r.grad) g *= 1.01;
            return r;
        },
        gaussian_batch(16, 3, rng));
    EXPECT_GT(bad.max_rel_err, 1e-3);
}

TEST(FiniteDifference, ClampedMomentGradientIsFinite) {
    PointBatch b(12, 4);
    for (std::size_t i = 0; i < 12; ++i) {
        b(i, 0) = 1.0 + 1e-7 * static_cast<double>(i);
        b(i, 1) = 0.3;
    }
    const FdReport r = finite_difference_check([](const PointBatch& x) { return moment_w2_loss(x); }, b);
    EXPECT_TRUE(std::isfinite(r.max_rel_err));
    EXPECT_TRUE(std::isfinite(r.cosine));
    for (double g : moment_w2_loss(b).grad) EXPECT_TRUE(std::isfinite(g));
}

TEST(FiniteDifference, RejectsLargeBatches) {
    RngStream rng(3, "test/fd-large");
    EXPECT_THROW(finite_difference_check([](const PointBatch& x) { return moment_w2_loss(x); }, gaussian_batch(65, 2, rng)),
                 ContractViolation);
}

TEST(Pearson, KnownValues) {
    EXPECT_NEAR(pearson_correlation({1, 2, 3}, {2, 4, 6}), 1.0, 1e-15);
    EXPECT_NEAR(pearson_correlation({1, 2, 3}, {3, 2, 1}), -1.0, 1e-15);
}
