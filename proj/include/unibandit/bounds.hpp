#pragma once

// Closed-form regret and optimization-error guarantees of the pentachotomy
// policies, evaluated numerically. The unspecified envelope f-bar(T) is
// replaced by the solved threshold f(T, T^{-gamma}) for three arms.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "unibandit/envs.hpp"
#include "unibandit/trim_test.hpp"

namespace unibandit {

inline constexpr double kShrink = 0.75;  // psi: width kept by one trim

/// f-bar(T) = solve_threshold(T, T^{-gamma}, 3).
inline double threshold_envelope(std::int64_t horizon, double gamma) {
    if (horizon < 2) throw std::domain_error("bounds need T >= 2");
    if (!(gamma > 0.0)) throw std::domain_error("bounds need gamma > 0");
    return solve_threshold(horizon, std::pow(static_cast<double>(horizon), -gamma), 3);
}

namespace detail {

inline void check_bound_args(const ClassParams& p, std::int64_t horizon, double gamma) {
    if (!(p.c1 > 0.0 && p.c1 <= p.c2 && std::isfinite(p.c2)))
        throw std::domain_error("class constants need 0 < C1 <= C2 < inf");
    if (!(p.xi > 0.0)) throw std::domain_error("class exponent xi must be > 0");
    if (horizon < 2) throw std::domain_error("bounds need T >= 2");
    if (!(gamma > 0.5)) throw std::domain_error("bounds need gamma > 1/2");
}

// log(T C1 psi^{-xi}) / (xi log(1/psi)): the phase count at which the
// peak-neighbourhood width drops below the regret scale.
inline double phase_term(const ClassParams& p, double t) {
    return std::log(t * p.c1 * std::pow(kShrink, -p.xi)) / (p.xi * std::log(1.0 / kShrink));
}

}  // namespace detail

/// Regret guarantee for mu in U(C1, C2):
///   2 psi^{-3xi/2} C2 / (C1 a_xi) sqrt(3 T (f + 32) / (psi^{-xi} - 1))
///     + mu* T^{1-gamma} log(T C1 psi^{-xi}) / (xi log(1/psi)).
inline double regret_bound(const ClassParams& p, std::int64_t horizon, double gamma, double mu_star = 1.0) {
    detail::check_bound_args(p, horizon, gamma);
    const auto t = static_cast<double>(horizon);
    const double f = threshold_envelope(horizon, gamma);
    const double lead = 2.0 * std::pow(kShrink, -1.5 * p.xi) * p.c2 / (p.c1 * p.a_xi());
    const double main = lead * std::sqrt(3.0 * t * (f + 32.0) / (std::pow(kShrink, -p.xi) - 1.0));
    const double risk = mu_star * std::pow(t, 1.0 - gamma) * detail::phase_term(p, t);
    return main + risk;
}

/// Optimization-error guarantee for mu in U(C1, C2):
///   C2 / (C1 a_xi) sqrt(24 f / (T (psi^{-2xi} - 1)))
///     + 3 T^{-gamma} mu* log(T C1 psi^{-xi}) / (xi log(1/psi)).
inline double error_bound(const ClassParams& p, std::int64_t horizon, double gamma, double mu_star = 1.0) {
    detail::check_bound_args(p, horizon, gamma);
    const auto t = static_cast<double>(horizon);
    const double f = threshold_envelope(horizon, gamma);
    const double main = p.c2 / (p.c1 * p.a_xi()) * std::sqrt(24.0 * f / (t * (std::pow(kShrink, -2.0 * p.xi) - 1.0)));
    const double risk = 3.0 * std::pow(t, -gamma) * mu_star * detail::phase_term(p, t);
    return main + risk;
}

/// Three-term bound valid for any unimodal mu and any N:
///   mu* N T^{1-gamma} + T g(psi^N) + 3 (f + 32) sum_{N' < N} g(psi^N') / h(psi^N')^2,
/// minimized over N in [0, max_phases].
inline double regret_bound_generic(const UnimodalEnv& env, std::int64_t horizon, double gamma, int max_phases = 200) {
    if (horizon < 2) throw std::domain_error("bounds need T >= 2");
    if (!(gamma > 0.5)) throw std::domain_error("bounds need gamma > 1/2");
    const auto t = static_cast<double>(horizon);
    const double f = threshold_envelope(horizon, gamma);
    const double risk_unit = env.mu_star() * std::pow(t, 1.0 - gamma);
    double best = kInfinity;
    double partial = 0.0;  // sum over N' < N
    for (int n = 0; n <= max_phases; ++n) {
        const double width = std::pow(kShrink, n);
        const double total = risk_unit * n + t * g_mu(env, width) + 3.0 * (f + 32.0) * partial;
        best = std::min(best, total);
        const double h = h_mu(env, width);
        partial += h > 0.0 ? g_mu(env, width) / (h * h) : kInfinity;
    }
    return best;
}

}  // namespace unibandit
