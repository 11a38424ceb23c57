#pragma once

// Ground-truth unimodal mean functions on [0,1] and the structural quantities
// (class constants, g_mu, h_mu) that enter the regret and error bounds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "unibandit/kl.hpp"

namespace unibandit {

/// mu(x) = 1 - (|x - xstar| / D)^xi with D = max(xstar, 1 - xstar), so the
/// function spans [0, 1]; for xstar = 1/2 this is 1 - (2|1/2 - x|)^xi.
struct PowerPeak {
    double xi{1.0};
    double xstar{0.5};
};

/// Linear interpolation between knots (x, mu); x runs from 0 to 1.
struct PiecewiseLinear {
    std::vector<std::pair<double, double>> knots;
};

using EnvShape = std::variant<PowerPeak, PiecewiseLinear>;

/// Constants (C1, C2, xi) of the class U(C1, C2).
struct ClassParams {
    double c1{1.0};
    double c2{1.0};
    double xi{1.0};

    /// a_xi = 4^{-xi} min(1, 2^xi - 1)
    double a_xi() const { return std::pow(4.0, -xi) * std::min(1.0, std::pow(2.0, xi) - 1.0); }
};

class UnimodalEnv {
public:
    UnimodalEnv(EnvShape shape, RewardModel model = RewardModel::bernoulli())
        : shape_(std::move(shape)), model_(model) {
        validate();
    }

    static UnimodalEnv power_peak(double xi, double xstar = 0.5,
                                  RewardModel model = RewardModel::bernoulli()) {
        return UnimodalEnv(PowerPeak{xi, xstar}, model);
    }

    static UnimodalEnv piecewise_linear(std::vector<std::pair<double, double>> knots,
                                        RewardModel model = RewardModel::bernoulli()) {
        return UnimodalEnv(PiecewiseLinear{std::move(knots)}, model);
    }

    const EnvShape& shape() const { return shape_; }
    const RewardModel& model() const { return model_; }
    double xstar() const { return xstar_; }
    double mu_star() const { return mu_star_; }

    const PowerPeak* as_power_peak() const { return std::get_if<PowerPeak>(&shape_); }

    /// Exact mean reward at x in [0,1].
    double mean(double x) const {
        if (!(x >= 0.0 && x <= 1.0))
            throw std::domain_error("arm " + std::to_string(x) + " outside [0,1]");
        if (const auto* p = std::get_if<PowerPeak>(&shape_)) {
            const double dist = std::abs(x - p->xstar) / peak_scale(*p);
            return 1.0 - std::pow(dist, p->xi);
        }
        const auto& knots = std::get<PiecewiseLinear>(shape_).knots;
        auto it = std::upper_bound(knots.begin(), knots.end(), x,
                                   [](double v, const auto& k) { return v < k.first; });
        if (it == knots.end()) return knots.back().second;
        if (it == knots.begin()) return knots.front().second;
        const auto& [x1, y1] = *it;
        const auto& [x0, y0] = *(it - 1);
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }

    /// Mean at x after clamping to [0,1].
    double mean_clamped(double x) const { return mean(std::clamp(x, 0.0, 1.0)); }

private:
    static double peak_scale(const PowerPeak& p) { return std::max(p.xstar, 1.0 - p.xstar); }

    void validate() {
        if (const auto* p = std::get_if<PowerPeak>(&shape_)) {
            if (!(p->xi > 0.0) || !std::isfinite(p->xi))
                throw std::invalid_argument("power peak needs xi > 0");
            if (!(p->xstar >= 0.0 && p->xstar <= 1.0))
                throw std::invalid_argument("power peak needs xstar in [0,1]");
            xstar_ = p->xstar;
            mu_star_ = 1.0;
        } else {
            const auto& knots = std::get<PiecewiseLinear>(shape_).knots;
            if (knots.size() < 2) throw std::invalid_argument("piecewise linear env needs >= 2 knots");
            if (knots.front().first != 0.0 || knots.back().first != 1.0)
                throw std::invalid_argument("piecewise linear knots must start at 0 and end at 1");
            std::size_t peak = 0;
            for (std::size_t i = 1; i < knots.size(); ++i) {
                if (!(knots[i].first > knots[i - 1].first))
                    throw std::invalid_argument("piecewise linear knots must be strictly increasing in x");
                if (knots[i].second > knots[peak].second) peak = i;
            }
            for (std::size_t i = 1; i < knots.size(); ++i) {
                const bool rising = i <= peak;
                const double dy = knots[i].second - knots[i - 1].second;
                if (rising ? !(dy > 0.0) : !(dy < 0.0))
                    throw std::invalid_argument("piecewise linear knots are not strictly unimodal");
            }
            xstar_ = knots[peak].first;
            mu_star_ = knots[peak].second;
            for (const auto& knot : knots)
                if (!model_.valid_mean(knot.second))
                    throw std::invalid_argument("piecewise linear knot mean outside the model's mean set");
        }
    }

    EnvShape shape_;
    RewardModel model_;
    double xstar_{0.5};
    double mu_star_{1.0};
};

inline double eval_mean(const UnimodalEnv& env, double x) { return env.mean(x); }

/// Worst gap at distance delta from the peak:
///   mu* - min(mu(x* - delta), mu(x* + delta)), arguments clamped to [0,1].
inline double g_mu(const UnimodalEnv& env, double delta) {
    if (!(delta > 0.0)) throw std::domain_error("g_mu needs delta > 0");
    const double x = env.xstar();
    return env.mu_star() - std::min(env.mean_clamped(x - delta), env.mean_clamped(x + delta));
}

namespace detail {

// min over x in [lo, hi] of mu(x) - mu(x + step); grid scan, then Brent on the
// bracketing cell.
inline double min_drop(const UnimodalEnv& env, double lo, double hi, double step) {
    auto drop = [&](double x) { return env.mean_clamped(x) - env.mean_clamped(x + step); };
    if (hi <= lo) return drop(lo);
    constexpr int kGrid = 2000;
    double best = drop(lo);
    int best_i = 0;
    for (int i = 1; i <= kGrid; ++i) {
        const double x = lo + (hi - lo) * i / kGrid;
        const double v = drop(x);
        if (v < best) {
            best = v;
            best_i = i;
        }
    }
    const double a = lo + (hi - lo) * std::max(0, best_i - 1) / kGrid;
    const double b = lo + (hi - lo) * std::min(kGrid, best_i + 1) / kGrid;
    const auto [xm, vm] = boost::math::tools::brent_find_minima(drop, a, b, 52);
    (void)xm;
    return std::min(best, vm);
}

}  // namespace detail

/// h_mu by direct numerical minimization (grid + Brent refinement).
inline double h_mu_numeric(const UnimodalEnv& env, double delta) {
    if (!(delta > 0.0)) throw std::domain_error("h_mu needs delta > 0");
    const double q = delta / 4.0;
    const double x = env.xstar();
    const double right = detail::min_drop(env, std::clamp(x, 0.0, 1.0), std::clamp(x + q, 0.0, 1.0), q);
    const double left = detail::min_drop(env, std::clamp(x - q, 0.0, 1.0), std::clamp(x, 0.0, 1.0), -q);
    return std::min(right, left);
}

/// Smallest drop over a quarter step next to the peak:
///   min{ min_{x in [x*, x*+delta/4]} mu(x) - mu(x + delta/4),
///        min_{x in [x*-delta/4, x*]} mu(x) - mu(x - delta/4) }.
/// Power peaks whose evaluation window x* +- delta/2 stays inside [0,1] use
/// the closed form; everything else is minimized numerically.
inline double h_mu(const UnimodalEnv& env, double delta) {
    if (!(delta > 0.0)) throw std::domain_error("h_mu needs delta > 0");
    if (const auto* p = env.as_power_peak()) {
        if (p->xstar - delta / 2.0 >= 0.0 && p->xstar + delta / 2.0 <= 1.0) {
            const double c = std::pow(std::max(p->xstar, 1.0 - p->xstar), -p->xi);
            const double q = std::pow(delta / 4.0, p->xi);
            return p->xi >= 1.0 ? c * q : c * (std::pow(2.0, p->xi) - 1.0) * q;
        }
    }
    return h_mu_numeric(env, delta);
}

/// (C1, C2, xi) for power peaks. With C = max(x*, 1 - x*)^{-xi} the gap is
/// exactly mu* - mu(x) = C |x* - x|^xi, so (P1) and (P2) hold with equality
/// for C1 = C2 = C (2^xi at x* = 1/2).
inline ClassParams class_params(const UnimodalEnv& env) {
    const auto* p = env.as_power_peak();
    if (p == nullptr)
        throw std::invalid_argument("unknown class constants: only power-peak envs carry (C1, C2, xi)");
    const double c = std::pow(std::max(p->xstar, 1.0 - p->xstar), -p->xi);
    return {c, c, p->xi};
}

}  // namespace unibandit
