#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "unibandit/kl.hpp"

using namespace unibandit;

namespace {
const RewardModel kBern = RewardModel::bernoulli();
}

TEST(KlBernoulli, ReferenceValues) {
    EXPECT_EQ(kl(kBern, 0.5, 0.5), 0.0);
    EXPECT_NEAR(kl(kBern, 0.5, 0.25), 0.143841036225890, 1e-13);
    EXPECT_NEAR(kl(kBern, 0.5, 0.25), 0.5 * std::log(4.0 / 3.0), 1e-15);
    EXPECT_NEAR(kl(kBern, 0.3, 0.5), 0.0822828785050518, 1e-13);
    EXPECT_NEAR(kl(kBern, 1.0, 0.5), std::log(2.0), 1e-15);
    EXPECT_NEAR(kl(kBern, 0.0, 0.5), std::log(2.0), 1e-15);
}

TEST(KlBernoulli, BoundaryConventions) {
    EXPECT_EQ(kl(kBern, 0.0, 0.0), 0.0);
    EXPECT_EQ(kl(kBern, 1.0, 1.0), 0.0);
    EXPECT_EQ(kl(kBern, 0.3, 0.0), kInfinity);
    EXPECT_EQ(kl(kBern, 0.3, 1.0), kInfinity);
    EXPECT_EQ(kl(kBern, 1.0, 0.0), kInfinity);
    // comparisons with the infinite value stay well defined
    EXPECT_GT(kl(kBern, 0.5, 1.0), 1e300);
}

TEST(KlBernoulli, RejectsMeansOutsideUnitInterval) {
    EXPECT_THROW(kl(kBern, -0.1, 0.5), std::domain_error);
    EXPECT_THROW(kl(kBern, 0.5, 1.0001), std::domain_error);
    EXPECT_THROW(kl(kBern, std::nan(""), 0.5), std::domain_error);
}

TEST(KlGaussian, ClosedForm) {
    const auto g = RewardModel::gaussian(2.0);
    EXPECT_DOUBLE_EQ(kl(g, 1.0, 3.0), 0.5);
    EXPECT_DOUBLE_EQ(kl(g, -1.0, -1.0), 0.0);
    EXPECT_DOUBLE_EQ(kl(g, 5.0, 2.0), kl(g, 2.0, 5.0));
    EXPECT_THROW(RewardModel::gaussian(0.0), std::invalid_argument);
    EXPECT_THROW(RewardModel::gaussian(-1.0), std::invalid_argument);
    EXPECT_THROW(kl(g, kInfinity, 0.0), std::domain_error);
}

TEST(KlBernoulli, PinskerOnDenseGrid) {
    constexpr int n = 400;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const double a = static_cast<double>(i) / n, b = static_cast<double>(j) / n;
            ASSERT_GE(kl(kBern, a, b), 2.0 * (a - b) * (a - b) - 1e-15) << a << " " << b;
        }
    }
}

TEST(KlBernoulli, IdentityAndPositivity) {
    for (int i = 0; i <= 200; ++i) {
        const double a = i / 200.0;
        EXPECT_EQ(kl(kBern, a, a), 0.0);
        for (int j = 0; j <= 200; ++j)
            if (j != i) {
                ASSERT_GT(kl(kBern, a, j / 200.0), 0.0);
            }
    }
}

TEST(KlBernoulli, MonotoneInSecondArgumentAwayFromFirst) {
    constexpr int n = 200;
    for (int i = 0; i <= n; ++i) {
        const double a = static_cast<double>(i) / n;
        // nondecreasing on [a, 1]
        for (int j = i; j < n; ++j)
            ASSERT_LE(kl(kBern, a, static_cast<double>(j) / n), kl(kBern, a, static_cast<double>(j + 1) / n));
        // nonincreasing on [0, a]
        for (int j = 0; j < i; ++j)
            ASSERT_GE(kl(kBern, a, static_cast<double>(j) / n), kl(kBern, a, static_cast<double>(j + 1) / n));
    }
}

TEST(KlStar, ReferenceValues) {
    EXPECT_EQ(kl_star(kBern, 0.7, 0.3), 0.0);
    EXPECT_EQ(kl_star(kBern, 0.4, 0.4), 0.0);
    EXPECT_NEAR(kl_star(kBern, 0.3, 0.7), 0.164565757010104, 1e-13);
    EXPECT_NEAR(kl_star_eps(kBern, 0.3, 0.7, 0.05), 0.0412502102654818, 1e-13);
    EXPECT_NEAR(kl_star_eps(kBern, 0.3, 0.7, 0.05), kl(kBern, 0.35, 0.45) + kl(kBern, 0.65, 0.55), 1e-15);
}

TEST(KlStar, MidpointIdentity) {
    for (int i = 0; i <= 50; ++i) {
        for (int j = i + 1; j <= 50; ++j) {
            const double m1 = i / 50.0, m2 = j / 50.0, mid = 0.5 * (m1 + m2);
            ASSERT_DOUBLE_EQ(kl_star(kBern, m1, m2), kl(kBern, m1, mid) + kl(kBern, m2, mid));
        }
    }
}

TEST(KlStar, PaddingShrinksTheStatistic) {
    for (double eps : {0.0, 0.01, 0.05, 0.09})
        EXPECT_LE(kl_star_eps(kBern, 0.3, 0.7, eps + 0.005), kl_star_eps(kBern, 0.3, 0.7, eps));
}

TEST(KlStar, ShiftedMeansMustStayValid) {
    EXPECT_THROW(kl_star_eps(kBern, 0.0, 0.5, -0.01), std::domain_error);
    EXPECT_THROW(kl_star_eps(kBern, 0.97, 1.2, 0.0), std::domain_error);
    EXPECT_THROW(kl_star_eps(kBern, 0.9, 0.95, 0.1), std::domain_error);
    EXPECT_NO_THROW(kl_star_eps(kBern, 0.0, 1.0, 0.2));
}

TEST(Sample, DegenerateBernoulli) {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_EQ(sample(kBern, 1.0, rng), 1.0);
        EXPECT_EQ(sample(kBern, 0.0, rng), 0.0);
    }
}

TEST(Sample, BernoulliEmpiricalMean) {
    constexpr int n = 1'000'000;
    double total = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        Rng rng(seed);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += sample(kBern, 0.5, rng);
        EXPECT_NEAR(sum / n, 0.5, 3.0 * 0.5 / std::sqrt(static_cast<double>(n)));
        total += sum / n;
    }
    EXPECT_NEAR(total / 3.0, 0.5, 0.003);
}

TEST(Sample, GaussianMoments) {
    const auto g = RewardModel::gaussian(0.5);
    Rng rng(5);
    constexpr int n = 200'000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = sample(g, 2.0, rng);
        s += r;
        ss += r * r;
    }
    const double mean = s / n;
    EXPECT_NEAR(mean, 2.0, 0.01);
    EXPECT_NEAR(ss / n - mean * mean, 0.25, 0.005);
}

TEST(Sample, RejectsInvalidMean) {
    Rng rng(1);
    EXPECT_THROW(sample(kBern, 1.5, rng), std::domain_error);
}

TEST(Rng, SameSeedReplaysBitExactly) {
    Rng a(42), b(42);
    for (int i = 0; i < 10000; ++i) ASSERT_EQ(a.uniform(), b.uniform());
    Rng c(43);
    int same = 0;
    Rng d(42);
    for (int i = 0; i < 1000; ++i) same += c.uniform() == d.uniform();
    EXPECT_LT(same, 5);
}

TEST(Rng, UniformRange) {
    Rng rng(3);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const double v = rng.uniform(0.25, 0.75);
        ASSERT_GE(v, 0.25);
        ASSERT_LT(v, 0.75);
    }
}

TEST(Rng, DerivedStreamsAreDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t seed = 0; seed < 50; ++seed)
        for (std::uint64_t stream = 0; stream < 50; ++stream) seen.insert(derive_seed(seed, stream));
    EXPECT_EQ(seen.size(), 2500u);
    EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}
