#include <gtest/gtest.h>

#include <cmath>

#include "arident/noise.hpp"
#include "stat_helpers.hpp"

using namespace arident;

namespace {
constexpr std::uint64_t kSeed = 911;
}

TEST(Noise, ZeroVarianceWhiteIsConstantMean) {
    const auto zeros = sample_white(NoiseSpec::white(0.0, 0.0), 5, {kSeed, 0});
    for (double x : zeros) EXPECT_EQ(x, 0.0);

    const auto fours = sample_white(NoiseSpec::white(4.0, 0.0), 3, {kSeed, 0});
    for (double x : fours) EXPECT_EQ(x, 4.0);
}

TEST(Noise, WhiteSampleMomentsMatchSpec) {
    const auto x = sample_white(NoiseSpec::white(0.0, 9.0), 1000000, {kSeed, 1});
    EXPECT_NEAR(testutil::sample_mean(x), 0.0, 0.02);
    EXPECT_NEAR(testutil::sample_variance(x), 9.0, 0.1);
}

TEST(Noise, WhiteDrawsAreUncorrelatedAcrossLags) {
    const auto x = sample_white(NoiseSpec::white(0.0, 1.0), 1000000, {kSeed, 2});
    for (std::size_t lag = 1; lag <= 5; ++lag) {
        EXPECT_NEAR(testutil::sample_autocov(x, lag), 0.0, 0.005) << "lag " << lag;
    }
}

TEST(Noise, NegativeVarianceRejected) {
    EXPECT_THROW(sample_white(NoiseSpec::white(0.0, -1.0), 10, {kSeed, 0}),
                 spec_error);
}

TEST(Noise, KindMismatchRejected) {
    EXPECT_THROW(sample_white(NoiseSpec::colored_ar1(-0.5, 1.0), 10, {kSeed, 0}),
                 spec_error);
    EXPECT_THROW(sample_colored(NoiseSpec::white(0.0, 1.0), 10, {kSeed, 0}),
                 spec_error);
}

TEST(Noise, ZeroLengthRejected) {
    EXPECT_THROW(sample_white(NoiseSpec::white(0.0, 1.0), 0, {kSeed, 0}), spec_error);
}

TEST(Noise, SameStreamReproducesBitwise) {
    const SeededStream stream{kSeed, 7};
    const auto a = sample_white(NoiseSpec::white(1.0, 2.0), 256, stream);
    const auto b = sample_white(NoiseSpec::white(1.0, 2.0), 256, stream);
    EXPECT_EQ(a, b);

    const auto c = sample_colored(NoiseSpec::colored_ar1(-0.5, 1.0), 256, stream, 10);
    const auto d = sample_colored(NoiseSpec::colored_ar1(-0.5, 1.0), 256, stream, 10);
    EXPECT_EQ(c, d);
}

TEST(Noise, DistinctStreamsDiffer) {
    const auto a = sample_white(NoiseSpec::white(0.0, 1.0), 64, {kSeed, 0});
    const auto b = sample_white(NoiseSpec::white(0.0, 1.0), 64, {kSeed, 1});
    const auto c = sample_white(NoiseSpec::white(0.0, 1.0), 64, {kSeed + 1, 0});
    EXPECT_NE(a, b);
    EXPECT_NE(a, c);
}

TEST(Noise, SubstreamIsIndependentOfParent) {
    const SeededStream parent{kSeed, 3};
    const auto a = sample_white(NoiseSpec::white(0.0, 1.0), 64, parent);
    const auto b = sample_white(NoiseSpec::white(0.0, 1.0), 64, parent.substream(0));
    const auto c = sample_white(NoiseSpec::white(0.0, 1.0), 64, parent.substream(1));
    EXPECT_NE(a, b);
    EXPECT_NE(b, c);
}

TEST(Noise, ColoredWithZeroCoeffMatchesWhiteBitwise) {
    const SeededStream stream{kSeed, 4};
    const auto white = sample_white(NoiseSpec::white(0.0, 2.25), 1000, stream);
    const auto colored =
        sample_colored(NoiseSpec::colored_ar1(0.0, 2.25), 1000, stream);
    ASSERT_EQ(white.size(), colored.size());
    for (std::size_t t = 0; t < white.size(); ++t) {
        EXPECT_EQ(white[t], colored[t]) << "t = " << t;
    }
}

// Filter coefficient -1/2 with unit innovations: stationary variance
// 1/(1 - 1/4) = 4/3 and lag-1 autocovariance -1/2 * 4/3 = -2/3.
TEST(Noise, ColoredStationaryMomentsMatchFilter) {
    const auto q =
        sample_colored(NoiseSpec::colored_ar1(-0.5, 1.0), 1000000, {kSeed, 5});
    EXPECT_NEAR(testutil::sample_variance(q), 4.0 / 3.0, 0.01);
    EXPECT_NEAR(testutil::sample_autocov(q, 1), -2.0 / 3.0, 0.01);
    EXPECT_NEAR(testutil::sample_mean(q), 0.0, 0.01);
}

// The first sample already comes from the stationary law: its variance
// across many independent streams matches 4/3 without any burn-in.
TEST(Noise, ColoredStartsStationary) {
    std::vector<double> first;
    first.reserve(4000);
    for (std::uint64_t i = 0; i < 4000; ++i) {
        const auto q =
            sample_colored(NoiseSpec::colored_ar1(-0.5, 1.0), 3, {kSeed, i});
        first.push_back(q.front());
    }
    EXPECT_NEAR(testutil::sample_variance(first), 4.0 / 3.0, 0.15);
}

TEST(Noise, ColoredSpecRejectsBadParameters) {
    EXPECT_THROW(sample_colored(NoiseSpec::colored_ar1(1.0, 1.0), 10, {kSeed, 0}),
                 spec_error);
    EXPECT_THROW(sample_colored(NoiseSpec::colored_ar1(-1.5, 1.0), 10, {kSeed, 0}),
                 spec_error);
    NoiseSpec shifted = NoiseSpec::colored_ar1(-0.5, 1.0);
    shifted.mean = 0.3;
    EXPECT_THROW(sample_colored(shifted, 10, {kSeed, 0}), spec_error);
}
