#include <gtest/gtest.h>

#include <cmath>

#include "unibandit/bounds.hpp"

using namespace unibandit;

namespace {
ClassParams peak_params(double xi) { return class_params(UnimodalEnv::power_peak(xi)); }
}  // namespace

TEST(ThresholdEnvelope, UsesSolvedThreshold) {
    EXPECT_DOUBLE_EQ(threshold_envelope(10000, 0.6), solve_threshold(10000, std::pow(1e4, -0.6), 3));
    EXPECT_THROW(threshold_envelope(1, 0.6), std::domain_error);
    EXPECT_THROW(threshold_envelope(100, 0.0), std::domain_error);
}

TEST(RegretBound, MatchesHandEvaluation) {
    const auto p = peak_params(1.0);
    const std::int64_t t = 100000;
    const double f = threshold_envelope(t, 0.6);
    const double psi = 0.75;
    const double a = 0.25;  // 4^-1 min(1, 1)
    const double main = 2.0 * std::pow(psi, -1.5) * 2.0 / (2.0 * a) * std::sqrt(3.0 * 1e5 * (f + 32.0) / (1.0 / psi - 1.0));
    const double risk = std::pow(1e5, 0.4) * std::log(1e5 * 2.0 / psi) / std::log(1.0 / psi);
    EXPECT_NEAR(regret_bound(p, t, 0.6), main + risk, 1e-9 * (main + risk));
}

TEST(RegretBound, GrowsLikeSqrtTLogT) {
    const auto p = peak_params(1.0);
    const double ratio = regret_bound(p, 1000000, 0.6) / regret_bound(p, 10000, 0.6);
    EXPECT_GE(ratio, 9.0);
    EXPECT_LE(ratio, 13.0);
}

TEST(RegretBound, RiskTermShareVanishes) {
    const auto p = peak_params(1.0);
    double prev_share = 1.0;
    for (std::int64_t t = 10000; t <= 100000000; t *= 10) {
        const double tt = static_cast<double>(t);
        const double risk = std::pow(tt, 0.4) * std::log(tt * 2.0 / 0.75) / std::log(1.0 / 0.75);
        const double share = risk / regret_bound(p, t, 0.6);
        EXPECT_LT(share, prev_share);
        prev_share = share;
    }
}

TEST(RegretBound, GenericBoundNotAboveClosedForm) {
    for (double xi : {0.5, 1.0, 2.0})
        for (std::int64_t t : {10000, 100000, 1000000}) {
            const auto env = UnimodalEnv::power_peak(xi);
            EXPECT_LE(regret_bound_generic(env, t, 0.6), regret_bound(peak_params(xi), t, 0.6) * 1.01) << xi << " " << t;
        }
}

TEST(RegretBound, GenericBoundWorksWithoutClassConstants) {
    const auto env = UnimodalEnv::piecewise_linear({{0.0, 0.2}, {0.6, 0.8}, {1.0, 0.3}});
    const double b = regret_bound_generic(env, 100000, 0.6);
    EXPECT_GT(b, 0.0);
    EXPECT_LE(b, 100000.0);
}

TEST(RegretBound, Errors) {
    EXPECT_THROW(regret_bound(peak_params(1.0), 1, 0.6), std::domain_error);
    EXPECT_THROW(regret_bound(peak_params(1.0), 1000, 0.5), std::domain_error);
    EXPECT_THROW(regret_bound(ClassParams{2.0, 1.0, 1.0}, 1000, 0.6), std::domain_error);
    EXPECT_THROW(regret_bound(ClassParams{0.0, 1.0, 1.0}, 1000, 0.6), std::domain_error);
    EXPECT_THROW(error_bound(peak_params(1.0), 1000, 0.4), std::domain_error);
}

TEST(ErrorBound, DecreasesInHorizon) {
    for (double xi : {0.5, 1.0, 2.0}) {
        const auto p = peak_params(xi);
        EXPECT_LT(error_bound(p, 1000000, 0.6), error_bound(p, 10000, 0.6)) << xi;
    }
}

TEST(ErrorBound, ScalesLikeSqrtLogTOverT) {
    for (double xi : {0.5, 1.0, 2.0}) {
        const auto p = peak_params(xi);
        double lo = kInfinity, hi = 0.0;
        for (std::int64_t t = 10000; t <= 10000000; t *= 10) {
            const double tt = static_cast<double>(t);
            const double v = error_bound(p, t, 0.6) * std::sqrt(tt / std::log(tt));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        EXPECT_LT(hi / lo, 2.0) << xi;
    }
}

TEST(ErrorBound, RiskTermVanishesForLargeGamma) {
    const auto p = peak_params(1.0);
    const std::int64_t t = 100000;
    const double f = threshold_envelope(t, 50.0);
    const double main = 2.0 / (2.0 * 0.25) * std::sqrt(24.0 * f / (1e5 * (std::pow(0.75, -2.0) - 1.0)));
    EXPECT_NEAR(error_bound(p, t, 50.0), main, 1e-12);
}
