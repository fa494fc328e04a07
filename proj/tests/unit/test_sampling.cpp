#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "thinpred/sampling.hpp"

using namespace thinpred;

TEST(Mix64, MatchesSplitMix64Reference) {
    // First outputs of the reference SplitMix64 generator seeded with 0.
    EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(mix64(0x9e3779b97f4a7c15ULL), 0x6e789e6aa1b965f4ULL);
}

TEST(StableMix, DependsOnEveryCoordinate) {
    const auto s = stable_mix(42, 3, 0.5);
    EXPECT_EQ(s, stable_mix(42, 3, 0.5));
    EXPECT_NE(s, stable_mix(43, 3, 0.5));
    EXPECT_NE(s, stable_mix(42, 4, 0.5));
    EXPECT_NE(s, stable_mix(42, 3, 0.6));
}

TEST(BinomialThin, RateOneIsIdentityRateZeroIsZero) {
    const CountSeries x({3.0, 0.0, 7.25, 100.0}, "x");
    EXPECT_EQ(binomial_thin(x, 1.0, 9), x);
    const auto z = binomial_thin(x, 0.0, 9);
    for (double v : z.values()) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(z.size(), x.size());
}

TEST(BinomialThin, RejectsRatesOutsideUnitInterval) {
    const CountSeries x({1.0});
    EXPECT_THROW((void)binomial_thin(x, -0.01, 1), std::invalid_argument);
    EXPECT_THROW((void)binomial_thin(x, 1.01, 1), std::invalid_argument);
    EXPECT_THROW((void)binomial_thin(x, std::nan(""), 1), std::invalid_argument);
}

TEST(BinomialThin, MillionCountsAtHalf) {
    const CountSeries x({1e6});
    const double y = binomial_thin(x, 0.5, 2024)[0];
    EXPECT_NEAR(y, 5e5, 3.0 * 500.0);
    EXPECT_EQ(y, std::floor(y));
}

TEST(BinomialThin, FractionalPartKeptWholeOrDropped) {
    const CountSeries x(std::vector<double>(2000, 2.75));
    const auto y = binomial_thin(x, 0.4, 5);
    int kept = 0;
    for (double v : y.values()) {
        const double frac = v - std::floor(v);
        EXPECT_TRUE(frac == 0.0 || std::abs(frac - 0.75) < 1e-12) << v;
        if (frac != 0.0) ++kept;
        EXPECT_LE(v, 2.75);
    }
    // kept ~ Binomial(2000, 0.4): mean 800, sd ~ 21.9
    EXPECT_NEAR(kept, 800, 4 * 21.9);
}

TEST(BinomialThin, BoundedByInputEntrywise) {
    std::vector<double> v;
    for (int i = 0; i < 500; ++i) v.push_back(std::fmod(i * 7.31, 60.0));
    const CountSeries x(v);
    for (double p : {0.05, 0.3, 0.77}) {
        const auto y = binomial_thin(x, p, 77);
        for (std::size_t t = 0; t < x.size(); ++t) {
            EXPECT_GE(y[t], 0.0);
            EXPECT_LE(y[t], x[t]);
        }
    }
}

TEST(ReplicateThin, RateOneGivesCopiesAndDeterminism) {
    const CountSeries x({4, 8, 15, 16, 23, 42});
    const auto copies = replicate_thin(x, {1.0, 3, 7});
    ASSERT_EQ(copies.size(), 3u);
    for (const auto& c : copies) EXPECT_EQ(c, x);
    const SamplingPlan plan{0.35, 20, 1234};
    EXPECT_EQ(replicate_thin(x, plan), replicate_thin(x, plan));
}

TEST(ReplicateThin, UsesStableMixSeeds) {
    const CountSeries x({40, 41, 42});
    const SamplingPlan plan{0.5, 4, 99};
    const auto reps = replicate_thin(x, plan);
    for (std::size_t i = 0; i < reps.size(); ++i) {
        EXPECT_EQ(reps[i], binomial_thin(x, 0.5, stable_mix(99, i, 0.5)));
    }
}

TEST(ReplicateThin, GrandMeanAtHalf) {
    const CountSeries x(std::vector<double>(50, 100.0));
    const auto reps = replicate_thin(x, {0.5, 1000, 31});
    double sum = 0.0;
    for (const auto& r : reps) {
        for (double v : r.values()) sum += v;
    }
    EXPECT_NEAR(sum / (1000.0 * 50.0), 50.0, 0.5);
}

TEST(ReplicateThin, ConditionalMeanIsRateTimesCount) {
    const CountSeries x({3, 17, 60, 250, 0, 9.5});
    const double p = 0.3;
    const std::size_t R = 20000;
    const auto reps = replicate_thin(x, {p, R, 8});
    for (std::size_t t = 0; t < x.size(); ++t) {
        double s = 0.0;
        for (const auto& r : reps) s += r[t];
        const double whole = std::floor(x[t]);
        const double frac = x[t] - whole;
        const double sd = std::sqrt(whole * p * (1 - p) + frac * frac * p * (1 - p));
        EXPECT_NEAR(s / R, p * x[t], 4.0 * sd / std::sqrt(static_cast<double>(R)) + 1e-12) << t;
    }
}

TEST(ReplicateThin, VarianceOfConstantIntegerInput) {
    const double xv = 100.0;
    const double p = 0.2;
    const CountSeries x({xv});
    const std::size_t R = 100000;
    double s = 0.0;
    double s2 = 0.0;
    for (std::size_t i = 0; i < R; ++i) {
        const double y = binomial_thin(x, p, stable_mix(5, i, p))[0];
        s += y;
        s2 += y * y;
    }
    const double mean = s / R;
    const double var = s2 / R - mean * mean;
    EXPECT_NEAR(var, xv * p * (1 - p), 0.05 * xv * p * (1 - p));
}

TEST(ReplicateThin, DistinctReplicatesHaveDistinctStreams) {
    std::vector<double> v(64, 1000.0);
    const CountSeries x(v);
    const auto reps = replicate_thin(x, {0.5, 1000, 3});
    std::set<std::vector<double>> seen;
    std::set<std::uint64_t> seeds;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        seen.insert(reps[i].data());
        seeds.insert(stable_mix(3, i, 0.5));
    }
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_EQ(seeds.size(), 1000u);
}

TEST(SamplingPlan, Validation) {
    EXPECT_THROW((SamplingPlan{0.5, 0, 1}.validate()), std::invalid_argument);
    EXPECT_THROW((SamplingPlan{1.5, 1, 1}.validate()), std::invalid_argument);
    EXPECT_NO_THROW((SamplingPlan{0.0, 1, 1}.validate()));
}
