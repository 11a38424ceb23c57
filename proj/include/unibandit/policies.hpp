#pragma once

// Bandit policies on [0,1]: Stochastic Pentachotomy (exact IT_3 phases, SP,
// and closed-form IT_3' phases, SP'), KL-UCB on a fixed arm grid, and
// Kiefer-Wolfowitz stochastic approximation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "unibandit/envs.hpp"
#include "unibandit/kl.hpp"
#include "unibandit/trim_test.hpp"

namespace unibandit {

/// Interval [lower, lower + width] with both ends stored as exact
/// numerators over 4^depth. Every pentachotomy trim keeps three quarters of
/// the width, so after N trims the width is exactly 3^N / 4^N.
class ExactInterval {
public:
    using Int = boost::multiprecision::cpp_int;

    static ExactInterval unit() { return ExactInterval(Int(0), Int(1), 0); }

    unsigned depth() const { return depth_; }
    const Int& lower_num() const { return lower_; }
    const Int& width_num() const { return width_; }

    double lower() const { return to_double(lower_, depth_); }
    double upper() const { return to_double(lower_ + width_, depth_); }
    double width() const { return to_double(width_, depth_); }

    /// Arm k of the three equally spaced interior arms (k = 1, 2, 3), as a
    /// numerator over 4^(depth+1).
    Int arm_num(int k) const { return 4 * lower_ + k * width_; }
    double arm(int k) const { return to_double(arm_num(k), depth_ + 1); }

    /// Drops [lower, x_1).
    ExactInterval trim_left() const { return ExactInterval(4 * lower_ + width_, 3 * width_, depth_ + 1); }
    /// Drops (x_3, upper].
    ExactInterval trim_right() const { return ExactInterval(4 * lower_, 3 * width_, depth_ + 1); }

    bool contains(double x) const { return lower() <= x && x <= upper(); }

    /// Exact containment test: `inner` lies within this interval.
    bool contains(const ExactInterval& inner) const {
        const unsigned d = std::max(depth_, inner.depth_);
        const Int a_lo = scaled(lower_, d - depth_), a_hi = scaled(lower_ + width_, d - depth_);
        const Int b_lo = scaled(inner.lower_, d - inner.depth_), b_hi = scaled(inner.lower_ + inner.width_, d - inner.depth_);
        return a_lo <= b_lo && b_hi <= a_hi;
    }

    /// Exact check that this interval's width is 3/4 of `outer`'s.
    bool is_three_quarters_of(const ExactInterval& outer) const {
        if (depth_ != outer.depth_ + 1) return false;
        return width_ == 3 * outer.width_;
    }

    friend bool operator==(const ExactInterval&, const ExactInterval&) = default;

private:
    ExactInterval(Int lower, Int width, unsigned depth) : lower_(std::move(lower)), width_(std::move(width)), depth_(depth) {}

    static Int scaled(const Int& v, unsigned extra_depth) { return v << (2 * extra_depth); }

    static double to_double(const Int& num, unsigned depth) {
        if (num == 0) return 0.0;
        const auto msb = static_cast<long>(boost::multiprecision::msb(num));
        const long shift = std::max(0L, msb - 62);
        const double head = static_cast<double>(static_cast<std::uint64_t>(num >> shift));
        return std::ldexp(head, static_cast<int>(shift - 2L * static_cast<long>(depth)));
    }

    Int lower_;
    Int width_;
    unsigned depth_;
};

enum class PolicyKind { SP, SPPrime, KLUCBDelta, KW };

inline std::string to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::SP: return "sp";
        case PolicyKind::SPPrime: return "sp_prime";
        case PolicyKind::KLUCBDelta: return "kl_ucb";
        case PolicyKind::KW: return "kw";
    }
    return "?";
}

struct PolicyConfig {
    PolicyKind kind{PolicyKind::SPPrime};
    std::int64_t horizon_t{1};
    double gamma{0.6};          // SP, SP'
    double delta{0.1};          // KL-UCB grid step
    double loglog_coef{3.0};    // KL-UCB exploration: log n + c log log n
    double a0{1.0};             // KW gain a_n = a0 / n
    double c0{0.25};            // KW probe width c_n = c0 n^{-1/4}

    bool is_sp() const { return kind == PolicyKind::SP || kind == PolicyKind::SPPrime; }

    void validate() const {
        if (horizon_t < 1) throw std::invalid_argument("policy horizon must be >= 1");
        switch (kind) {
            case PolicyKind::SP:
            case PolicyKind::SPPrime:
                if (!(gamma > 0.5) || !std::isfinite(gamma)) throw std::invalid_argument("SP needs gamma > 1/2");
                break;
            case PolicyKind::KLUCBDelta:
                if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("KL-UCB grid step must lie in (0,1]");
                if (!(loglog_coef >= 0.0)) throw std::invalid_argument("KL-UCB log-log coefficient must be >= 0");
                break;
            case PolicyKind::KW:
                if (!(a0 >= 0.0) || !std::isfinite(a0)) throw std::invalid_argument("KW needs a0 >= 0");
                if (!(c0 > 0.0 && c0 < 0.5)) throw std::invalid_argument("KW needs c0 in (0, 1/2)");
                break;
        }
    }
};

struct PhaseRecord {
    ExactInterval interval;  // input interval of the phase
    Decision decision{Decision::NoDecision};
    std::int64_t length{0};
    double threshold{0.0};
};

struct PolicyTrace {
    std::vector<double> arms;
    std::vector<double> rewards;
    std::vector<double> cum_pseudo_regret;
    std::vector<PhaseRecord> phases;  // SP variants only
    double final_arm{0.5};

    double regret() const { return cum_pseudo_regret.empty() ? 0.0 : cum_pseudo_regret.back(); }
};

namespace detail {

// Records every play and forwards to the reward source.
template <class Draw>
struct TraceRecorder {
    const UnimodalEnv& env;
    PolicyTrace& trace;
    Draw& draw;
    double regret{0.0};

    double operator()(std::size_t arm, double x) {
        const double r = draw(arm, x);
        regret += env.mu_star() - env.mean(x);
        trace.arms.push_back(x);
        trace.rewards.push_back(r);
        trace.cum_pseudo_regret.push_back(regret);
        return r;
    }
};

inline void reserve_trace(PolicyTrace& trace, std::int64_t t) {
    trace.arms.reserve(static_cast<std::size_t>(t));
    trace.rewards.reserve(static_cast<std::size_t>(t));
    trace.cum_pseudo_regret.reserve(static_cast<std::size_t>(t));
}

}  // namespace detail

/// Stochastic Pentachotomy with an explicit reward source `draw(k, x)`.
///
/// Each phase runs a three-arm trimming test on the current interval with
/// horizon equal to the remaining budget and risk T^{-gamma} (T the full
/// horizon). A phase without decision uses up the rest of the budget.
template <class Draw>
PolicyTrace run_sp_with(const PolicyConfig& cfg, const UnimodalEnv& env, Draw&& draw) {
    cfg.validate();
    if (!cfg.is_sp()) throw std::invalid_argument("run_sp needs an SP or SP' policy");
    PolicyTrace trace;
    detail::reserve_trace(trace, cfg.horizon_t);
    detail::TraceRecorder<std::remove_reference_t<Draw>> rec{env, trace, draw};

    const double zeta = std::pow(static_cast<double>(cfg.horizon_t), -cfg.gamma);
    const TestVariant variant = cfg.kind == PolicyKind::SP ? TestVariant::ITK : TestVariant::IT3Prime;
    ExactInterval interval = ExactInterval::unit();
    std::int64_t remaining = cfg.horizon_t;
    while (remaining > 0) {
        TrimTestConfig test;
        test.lower = interval.lower();
        test.upper = interval.upper();
        test.k_arms = 3;
        test.horizon_s = remaining;
        // Only T = 1 gives T^{-gamma} = 1, and a one-round phase cannot stop.
        test.risk_zeta = zeta < 1.0 ? zeta : 0.5;
        test.variant = variant;
        const std::vector<double> arms{interval.arm(1), interval.arm(2), interval.arm(3)};
        const TrimOutcome out = run_trim_test_on(test, arms, env.model(), rec);
        trace.phases.push_back({interval, out.decision, out.length, out.threshold});
        remaining -= out.length;
        if (out.decision == Decision::TrimLeft)
            interval = interval.trim_left();
        else if (out.decision == Decision::TrimRight)
            interval = interval.trim_right();
    }
    trace.final_arm = trace.arms.back();
    return trace;
}

inline PolicyTrace run_sp(const PolicyConfig& cfg, const UnimodalEnv& env, Rng& rng) {
    return run_sp_with(cfg, env, EnvSampler{env, rng});
}

/// Interval in force after the last phase of an SP trace.
inline ExactInterval final_interval(const PolicyTrace& trace) {
    if (trace.phases.empty()) return ExactInterval::unit();
    const auto& last = trace.phases.back();
    if (last.decision == Decision::TrimLeft) return last.interval.trim_left();
    if (last.decision == Decision::TrimRight) return last.interval.trim_right();
    return last.interval;
}

// ---------------------------------------------------------------------------
// KL-UCB on a grid

/// Exploration budget log n + c log log max(n, 3).
inline double kl_ucb_exploration(std::int64_t n, double loglog_coef) {
    const auto nn = static_cast<double>(n);
    return std::log(nn) + loglog_coef * std::log(std::log(std::max(nn, 3.0)));
}

/// Largest q in [mean_hat, 1] with t_k KL(mean_hat, q) <= log n + c log log max(n, 3).
/// Unsampled arms (t_k = 0) get index 1; the Gaussian model uses the closed
/// form mean_hat + sigma sqrt(2 budget / t_k) (+inf when unsampled).
inline double kl_ucb_index(double mean_hat, std::int64_t t_k, std::int64_t n, double loglog_coef = 3.0,
                           const RewardModel& model = RewardModel::bernoulli()) {
    if (n < 1) throw std::domain_error("kl_ucb_index needs n >= 1");
    if (t_k < 0) throw std::domain_error("kl_ucb_index needs t_k >= 0");
    if (model.family == RewardFamily::GaussianKnownVariance) {
        if (t_k == 0) return kInfinity;
        return mean_hat + model.sigma * std::sqrt(2.0 * kl_ucb_exploration(n, loglog_coef) / static_cast<double>(t_k));
    }
    if (t_k == 0 || mean_hat >= 1.0) return 1.0;
    const double budget = kl_ucb_exploration(n, loglog_coef) / static_cast<double>(t_k);
    double lo = mean_hat, hi = 1.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (kl_bernoulli(mean_hat, mid) <= budget ? lo : hi) = mid;
    }
    return lo;
}

/// {0, delta, 2 delta, ...} below 1, then 1.
inline std::vector<double> kl_ucb_grid(double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("grid step must lie in (0,1]");
    std::vector<double> grid;
    for (std::int64_t i = 0;; ++i) {
        const double x = static_cast<double>(i) * delta;
        if (x >= 1.0 - 1e-12) break;
        grid.push_back(x);
    }
    grid.push_back(1.0);
    return grid;
}

/// KL-UCB index policy on the grid of step cfg.delta; ties go to the lowest
/// coordinate. `draw(k, x)` supplies rewards for grid arm k.
template <class Draw>
PolicyTrace run_kl_ucb_with(const PolicyConfig& cfg, const UnimodalEnv& env, Draw&& draw) {
    cfg.validate();
    if (cfg.kind != PolicyKind::KLUCBDelta) throw std::invalid_argument("run_kl_ucb needs a KL-UCB policy");
    PolicyTrace trace;
    detail::reserve_trace(trace, cfg.horizon_t);
    detail::TraceRecorder<std::remove_reference_t<Draw>> rec{env, trace, draw};

    const auto grid = kl_ucb_grid(cfg.delta);
    const std::size_t m = grid.size();
    const RewardModel& model = env.model();
    const bool bernoulli = model.family == RewardFamily::Bernoulli;
    std::vector<std::int64_t> pulls(m, 0);
    std::vector<double> sums(m, 0.0);
    std::size_t last_choice = 0;
    for (std::int64_t n = 1; n <= cfg.horizon_t; ++n) {
        // Exact argmax, seeded with the previous choice. For a sampled Bernoulli
        // arm, index_i >= best iff mean_i >= best or t_i KL(mean_i, best) <= budget,
        // so most arms are ruled out with a single divergence evaluation.
        const double explore = kl_ucb_exploration(n, cfg.loglog_coef);
        auto mean_of = [&](std::size_t i) { return pulls[i] ? sums[i] / static_cast<double>(pulls[i]) : 0.0; };
        auto index_of = [&](std::size_t i) { return kl_ucb_index(mean_of(i), pulls[i], n, cfg.loglog_coef, model); };
        std::size_t choice = last_choice;
        double best = index_of(choice);
        for (std::size_t i = 0; i < m; ++i) {
            if (i == last_choice) continue;
            if (bernoulli && pulls[i] > 0) {
                const double mh = mean_of(i);
                if (mh < best && static_cast<double>(pulls[i]) * kl_bernoulli(mh, best) > explore) continue;
            }
            const double idx = index_of(i);
            if (idx > best || (idx == best && i < choice)) {
                best = idx;
                choice = i;
            }
        }
        const double r = rec(choice, grid[choice]);
        last_choice = choice;
        sums[choice] += r;
        ++pulls[choice];
    }
    trace.final_arm = trace.arms.back();
    return trace;
}

inline PolicyTrace run_kl_ucb(const PolicyConfig& cfg, const UnimodalEnv& env, Rng& rng) {
    return run_kl_ucb_with(cfg, env, EnvSampler{env, rng});
}

/// Grid step (log T / sqrt T)^{1/xi}, capped at 1.
inline double kl_ucb_default_delta(std::int64_t horizon, double xi) {
    const auto t = static_cast<double>(std::max<std::int64_t>(horizon, 2));
    return std::min(1.0, std::pow(std::log(t) / std::sqrt(t), 1.0 / xi));
}

// ---------------------------------------------------------------------------
// Kiefer-Wolfowitz

/// Two plays per iteration, at x_n + c_n (arm 0) then x_n - c_n (arm 1), and
/// x_{n+1} = clamp(x_n + (a_n / c_n)(Y+ - Y-), c_n, 1 - c_n) with a_n = a0 / n,
/// c_n = c0 n^{-1/4}. `x1` is the starting point.
template <class Draw>
PolicyTrace run_kw_with(const PolicyConfig& cfg, const UnimodalEnv& env, double x1, Draw&& draw) {
    cfg.validate();
    if (cfg.kind != PolicyKind::KW) throw std::invalid_argument("run_kw needs a KW policy");
    PolicyTrace trace;
    detail::reserve_trace(trace, cfg.horizon_t);
    detail::TraceRecorder<std::remove_reference_t<Draw>> rec{env, trace, draw};

    double x = x1;
    std::int64_t played = 0;
    for (std::int64_t n = 1; played < cfg.horizon_t; ++n) {
        const auto nn = static_cast<double>(n);
        const double c = cfg.c0 * std::pow(nn, -0.25);
        x = std::clamp(x, c, 1.0 - c);
        const double y_plus = rec(0, std::min(1.0, x + c));
        if (++played == cfg.horizon_t) break;
        const double y_minus = rec(1, std::max(0.0, x - c));
        ++played;
        x = std::clamp(x + (cfg.a0 / nn) / c * (y_plus - y_minus), c, 1.0 - c);
    }
    trace.final_arm = trace.arms.back();
    return trace;
}

/// Kiefer-Wolfowitz with a start point drawn uniformly from [0.25, 0.75].
inline PolicyTrace run_kw(const PolicyConfig& cfg, const UnimodalEnv& env, Rng& rng) {
    const double x1 = rng.uniform(0.25, 0.75);
    return run_kw_with(cfg, env, x1, EnvSampler{env, rng});
}

/// Dispatches on the policy kind.
inline PolicyTrace run_policy(const PolicyConfig& cfg, const UnimodalEnv& env, Rng& rng) {
    switch (cfg.kind) {
        case PolicyKind::SP:
        case PolicyKind::SPPrime: return run_sp(cfg, env, rng);
        case PolicyKind::KLUCBDelta: return run_kl_ucb(cfg, env, rng);
        case PolicyKind::KW: return run_kw(cfg, env, rng);
    }
    throw std::invalid_argument("unknown policy kind");
}

/// mu* - mu(final arm) for one run.
inline double final_error(const PolicyTrace& trace, const UnimodalEnv& env) {
    if (trace.arms.empty()) throw std::invalid_argument("final_error needs a completed trace");
    return env.mu_star() - env.mean(trace.final_arm);
}

}  // namespace unibandit
