#pragma once

// Reward models, KL divergences and the seeded reward streams shared by every
// test and policy in the library.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace unibandit {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class RewardFamily { Bernoulli, GaussianKnownVariance };

/// One-parameter reward distribution family, parametrized by its mean.
/// `sigma` is only read for the Gaussian family.
struct RewardModel {
    RewardFamily family{RewardFamily::Bernoulli};
    double sigma{1.0};

    static RewardModel bernoulli() { return {RewardFamily::Bernoulli, 1.0}; }
    static RewardModel gaussian(double sigma) {
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw std::invalid_argument("gaussian reward model needs sigma > 0");
        return {RewardFamily::GaussianKnownVariance, sigma};
    }

    bool valid_mean(double m) const {
        if (family == RewardFamily::Bernoulli) return m >= 0.0 && m <= 1.0;
        return std::isfinite(m);
    }

    void check_mean(double m) const {
        if (!valid_mean(m))
            throw std::domain_error("mean " + std::to_string(m) + " outside the model's mean set");
    }

    friend bool operator==(const RewardModel&, const RewardModel&) = default;
};

inline std::string to_string(RewardFamily f) {
    return f == RewardFamily::Bernoulli ? "bernoulli" : "gaussian";
}

namespace detail {

// x log(x / y) with 0 log(0/y) = 0 and x log(x/0) = +inf for x > 0.
inline double xlogx_over_y(double x, double y) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return kInfinity;
    return x * std::log(x / y);
}

}  // namespace detail

/// Bernoulli KL divergence KL(a, b), a, b in [0,1].
inline double kl_bernoulli(double a, double b) {
    if (a == b) return 0.0;
    const double v = detail::xlogx_over_y(a, b) + detail::xlogx_over_y(1.0 - a, 1.0 - b);
    // Rounding can push tiny divergences below zero.
    return v < 0.0 ? 0.0 : v;
}

/// KL divergence between the model's distributions with means `a` and `b`.
/// Bernoulli returns +inf when `b` is 0 or 1 and `a` differs; Gaussian uses
/// (a - b)^2 / (2 sigma^2).
inline double kl(const RewardModel& model, double a, double b) {
    model.check_mean(a);
    model.check_mean(b);
    if (model.family == RewardFamily::Bernoulli) return kl_bernoulli(a, b);
    const double d = a - b;
    return d * d / (2.0 * model.sigma * model.sigma);
}

/// Padded two-point statistic
///   1{m1 < m2} [ KL(m1 + eps, mid - eps) + KL(m2 - eps, mid + eps) ],  mid = (m1 + m2) / 2.
inline double kl_star_eps(const RewardModel& model, double m1, double m2, double eps) {
    if (!(eps >= 0.0)) throw std::domain_error("kl_star_eps needs eps >= 0");
    model.check_mean(m1);
    model.check_mean(m2);
    if (!(m1 < m2)) return 0.0;
    const double mid = 0.5 * (m1 + m2);
    return kl(model, m1 + eps, mid - eps) + kl(model, m2 - eps, mid + eps);
}

inline double kl_star(const RewardModel& model, double m1, double m2) {
    return kl_star_eps(model, m1, m2, 0.0);
}

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for stream `stream` of replicate seed `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(0xD1B54A32D192ED03ULL * (stream + 1)));
}

/// Seeded random stream. Uniforms are built from the raw 64-bit engine output
/// so Bernoulli draws replay bit-exactly across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal(double mean, double sd) {
        std::normal_distribution<double> dist(mean, sd);
        return dist(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Draws one reward with the given mean. Bernoulli consumes exactly one
/// engine output per call.
inline double sample(const RewardModel& model, double mean, Rng& rng) {
    model.check_mean(mean);
    if (model.family == RewardFamily::Bernoulli) return rng.uniform() < mean ? 1.0 : 0.0;
    return rng.normal(mean, model.sigma);
}

}  // namespace unibandit
