#pragma once

// Order-constrained fits under the KL loss and the trimming statistic i_u.
//
// For a one-parameter exponential family, argmin_c sum_k w_k KL(v_k, c) is
// the weighted average of the v_k, so pool-adjacent-violators with weighted
// means yields the exact minimizer over monotone sequences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "unibandit/kl.hpp"

namespace unibandit {

enum class Direction { NonIncreasing, NonDecreasing };

/// Which outer slice a trimming decision removes. TrimLeft keeps [x_1, upper]
/// and is supported by up-slope evidence: its alternative (peak left of x_1)
/// forces the sampled means to be non-increasing. TrimRight is the mirror.
enum class TrimSide { TrimLeft, TrimRight };

constexpr Direction alternative_direction(TrimSide side) {
    return side == TrimSide::TrimLeft ? Direction::NonIncreasing : Direction::NonDecreasing;
}

struct Block {
    std::size_t begin{0};  // first index, inclusive
    std::size_t end{0};    // one past the last index
    friend bool operator==(const Block&, const Block&) = default;
};

struct MonotoneFit {
    std::vector<double> fitted;
    std::vector<Block> blocks;  // in index order
    double objective{0.0};
};

/// Reusable pool-adjacent-violators solver; holds scratch buffers so the
/// per-round statistic in the sequential tests does not allocate.
class PavaSolver {
public:
    explicit PavaSolver(RewardModel model = RewardModel::bernoulli()) : model_(model) {}

    const RewardModel& model() const { return model_; }

    /// Minimal sum_k w_k KL(values_k, c_k) over c monotone in `dir`.
    double objective(std::span<const double> values, std::span<const double> weights, Direction dir) {
        solve(values, weights, dir);
        double total = 0.0;
        for (const auto& b : stack_) {
            const double m = b.mean();
            for (std::size_t i = b.lo; i < b.hi; ++i) {
                const std::size_t k = original_index(i, values.size(), dir);
                total += weight(weights, k) * kl(model_, values[k], m);
            }
        }
        return total;
    }

    /// Unit-weight variant.
    double objective(std::span<const double> values, Direction dir) { return objective(values, {}, dir); }

    MonotoneFit fit(std::span<const double> values, std::span<const double> weights, Direction dir) {
        solve(values, weights, dir);
        const std::size_t n = values.size();
        MonotoneFit out;
        out.fitted.assign(n, 0.0);
        out.blocks.reserve(stack_.size());
        for (const auto& b : stack_) {
            const double m = b.mean();
            for (std::size_t i = b.lo; i < b.hi; ++i) {
                const std::size_t k = original_index(i, n, dir);
                out.fitted[k] = m;
                out.objective += weight(weights, k) * kl(model_, values[k], m);
            }
            if (dir == Direction::NonDecreasing)
                out.blocks.push_back({b.lo, b.hi});
            else
                out.blocks.push_back({n - b.hi, n - b.lo});
        }
        if (dir == Direction::NonIncreasing) std::reverse(out.blocks.begin(), out.blocks.end());
        return out;
    }

private:
    struct Pool {
        std::size_t lo, hi;  // positions in scan order
        double sum_w, sum_wv;
        double m;  // exact input value for singletons, sum_wv / sum_w after pooling
        double mean() const { return m; }
    };

    static double weight(std::span<const double> weights, std::size_t k) {
        return weights.empty() ? 1.0 : weights[k];
    }

    // A non-increasing fit is a non-decreasing fit of the reversed sequence.
    static std::size_t original_index(std::size_t i, std::size_t n, Direction dir) {
        return dir == Direction::NonDecreasing ? i : n - 1 - i;
    }

    void solve(std::span<const double> values, std::span<const double> weights, Direction dir) {
        const std::size_t n = values.size();
        if (n == 0) throw std::invalid_argument("monotone fit needs at least one value");
        if (!weights.empty() && weights.size() != n)
            throw std::invalid_argument("monotone fit: values and weights differ in length");
        stack_.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = original_index(i, n, dir);
            const double v = values[k];
            const double w = weight(weights, k);
            model_.check_mean(v);
            if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("monotone fit weights must be positive");
            stack_.push_back({i, i + 1, w, w * v, v});
            while (stack_.size() > 1 && stack_[stack_.size() - 2].mean() > stack_.back().mean()) {
                Pool top = stack_.back();
                stack_.pop_back();
                Pool& prev = stack_.back();
                prev.hi = top.hi;
                prev.sum_w += top.sum_w;
                prev.sum_wv += top.sum_wv;
                prev.m = prev.sum_wv / prev.sum_w;
            }
        }
        // Weighted averages of Bernoulli means can round a hair outside [0,1].
        if (model_.family == RewardFamily::Bernoulli) {
            for (auto& p : stack_) {
                p.m = std::clamp(p.m, 0.0, 1.0);
            }
        }
    }

    RewardModel model_;
    std::vector<Pool> stack_;
};

inline MonotoneFit antitonic_fit(std::span<const double> values, std::span<const double> weights,
                                 Direction dir, RewardModel model = RewardModel::bernoulli()) {
    return PavaSolver(model).fit(values, weights, dir);
}

/// i_u: infimum of the summed (weighted) KL divergence over unimodal
/// alternatives whose peak lies in the slice `side` would discard.
inline double i_u_exact(std::span<const double> values, std::span<const double> weights, TrimSide side,
                        RewardModel model = RewardModel::bernoulli()) {
    return PavaSolver(model).objective(values, weights, alternative_direction(side));
}

/// Exhaustive minimization of the same objective over monotone sequences on
/// the grid {lo, lo + step, ..., hi} ([0,1] for Bernoulli, [min, max] of the
/// values otherwise), by dynamic programming over (position, level).
inline double i_u_bruteforce(std::span<const double> values, std::span<const double> weights, TrimSide side,
                             double grid_step, RewardModel model = RewardModel::bernoulli()) {
    if (!(grid_step > 0.0 && grid_step <= 0.1)) throw std::invalid_argument("grid_step must lie in (0, 0.1]");
    if (values.empty()) throw std::invalid_argument("i_u_bruteforce needs at least one value");
    if (!weights.empty() && weights.size() != values.size())
        throw std::invalid_argument("i_u_bruteforce: values and weights differ in length");
    double lo = 0.0, hi = 1.0;
    if (model.family != RewardFamily::Bernoulli) {
        lo = *std::min_element(values.begin(), values.end());
        hi = *std::max_element(values.begin(), values.end());
    }
    const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / grid_step - 1e-9));
    std::vector<double> levels(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) levels[j] = std::min(hi, lo + grid_step * static_cast<double>(j));

    const bool increasing = alternative_direction(side) == Direction::NonDecreasing;
    std::vector<double> cost(levels.size(), 0.0), next(levels.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double w = weights.empty() ? 1.0 : weights[k];
        // best predecessor: levels <= j when increasing, >= j when decreasing
        if (increasing) {
            double run = kInfinity;
            for (std::size_t j = 0; j < levels.size(); ++j) {
                run = std::min(run, cost[j]);
                next[j] = run + w * kl(model, values[k], levels[j]);
            }
        } else {
            double run = kInfinity;
            for (std::size_t j = levels.size(); j-- > 0;) {
                run = std::min(run, cost[j]);
                next[j] = run + w * kl(model, values[k], levels[j]);
            }
        }
        cost.swap(next);
    }
    return *std::min_element(cost.begin(), cost.end());
}

}  // namespace unibandit
