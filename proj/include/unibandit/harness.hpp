#pragma once

// Monte Carlo experiment runner: declarative configs, seed-reproducible
// replicates, deterministic aggregation, CSV / JSON output.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "unibandit/bounds.hpp"
#include "unibandit/envs.hpp"
#include "unibandit/policies.hpp"
#include "unibandit/trim_test.hpp"

namespace unibandit {

inline constexpr const char* kResultSchema = "unibandit.results/1";

enum class ExperimentKind { Regret, Risk, TrimLength, StallDemo, BoundCheck };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Regret: return "regret";
        case ExperimentKind::Risk: return "risk";
        case ExperimentKind::TrimLength: return "trim-length";
        case ExperimentKind::StallDemo: return "stall-demo";
        case ExperimentKind::BoundCheck: return "bound-check";
    }
    return "?";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
    for (auto k : {ExperimentKind::Regret, ExperimentKind::Risk, ExperimentKind::TrimLength, ExperimentKind::StallDemo,
                   ExperimentKind::BoundCheck})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown experiment '" + s + "'");
}

struct EnvSpec {
    std::string id;
    UnimodalEnv env;
    nlohmann::json decl;
};

struct PolicySpec {
    std::string id;
    PolicyConfig cfg;
    bool auto_delta{false};  // KL-UCB: step (log T / sqrt T)^{1/xi} from the env
    nlohmann::json decl;
};

struct ExperimentConfig {
    ExperimentKind experiment{ExperimentKind::Regret};
    std::vector<EnvSpec> envs;
    std::vector<PolicySpec> policies;
    std::vector<std::int64_t> horizons;
    int replicates{1};
    std::uint64_t base_seed{1};
    std::string outputs{"results"};
    std::vector<TestVariant> tests{TestVariant::ITK, TestVariant::IT3Prime};
    std::vector<double> zetas{0.05};
    double gamma{0.6};  // trim-length: risk s^{-gamma}
    unsigned threads{0};  // 0: hardware concurrency

    void validate() const;
};

struct ResultRow {
    std::string env;
    std::string policy;
    std::int64_t horizon{0};
    std::optional<int> replicate;  // nullopt: aggregate
    std::string metric;
    double value{0.0};
    std::optional<double> stderr_;

    bool is_aggregate() const { return !replicate.has_value(); }
};

struct ResultTable {
    std::string schema{kResultSchema};
    std::vector<ResultRow> rows;

    /// First aggregate row matching the key; throws when absent.
    const ResultRow& aggregate(const std::string& env, const std::string& policy, std::int64_t horizon,
                               const std::string& metric) const {
        for (const auto& r : rows)
            if (r.is_aggregate() && r.env == env && r.policy == policy && r.horizon == horizon && r.metric == metric)
                return r;
        throw std::out_of_range("no aggregate row " + env + "/" + policy + "/" + std::to_string(horizon) + "/" + metric);
    }
};

// ---------------------------------------------------------------------------
// Config parsing

namespace detail {

inline RewardModel parse_model(const nlohmann::json& j) {
    const std::string family = j.value("model", std::string("bernoulli"));
    if (family == "bernoulli") return RewardModel::bernoulli();
    if (family == "gaussian") return RewardModel::gaussian(j.value("sigma", 1.0));
    throw std::invalid_argument("unknown reward model '" + family + "'");
}

inline std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace detail

inline EnvSpec parse_env(const nlohmann::json& j) {
    const std::string shape = j.at("shape").get<std::string>();
    const RewardModel model = detail::parse_model(j);
    if (shape == "power_peak") {
        const double xi = j.at("xi").get<double>();
        const double xstar = j.value("xstar", 0.5);
        std::string id = j.value("id", "power_peak_xi" + detail::fmt_num(xi) + "_x" + detail::fmt_num(xstar));
        return {std::move(id), UnimodalEnv::power_peak(xi, xstar, model), j};
    }
    if (shape == "piecewise_linear") {
        std::vector<std::pair<double, double>> knots;
        for (const auto& k : j.at("knots")) knots.emplace_back(k.at(0).get<double>(), k.at(1).get<double>());
        std::string id = j.value("id", std::string("piecewise_linear"));
        return {std::move(id), UnimodalEnv::piecewise_linear(std::move(knots), model), j};
    }
    throw std::invalid_argument("unknown env shape '" + shape + "'");
}

inline PolicySpec parse_policy(const nlohmann::json& j) {
    PolicySpec p;
    p.decl = j;
    const std::string kind = j.at("kind").get<std::string>();
    auto& c = p.cfg;
    if (kind == "sp" || kind == "sp_prime") {
        c.kind = kind == "sp" ? PolicyKind::SP : PolicyKind::SPPrime;
        c.gamma = j.value("gamma", 0.6);
        p.id = j.value("id", kind + "_g" + detail::fmt_num(c.gamma));
    } else if (kind == "kl_ucb") {
        c.kind = PolicyKind::KLUCBDelta;
        c.loglog_coef = j.value("loglog_coef", 3.0);
        if (!j.contains("delta") || (j.at("delta").is_string() && j.at("delta").get<std::string>() == "auto")) {
            p.auto_delta = true;
            p.id = j.value("id", std::string("kl_ucb_auto"));
        } else {
            c.delta = j.at("delta").get<double>();
            p.id = j.value("id", "kl_ucb_d" + detail::fmt_num(c.delta));
        }
    } else if (kind == "kw") {
        c.kind = PolicyKind::KW;
        c.a0 = j.value("a0", 1.0);
        c.c0 = j.value("c0", 0.25);
        p.id = j.value("id", "kw_a" + detail::fmt_num(c.a0) + "_c" + detail::fmt_num(c.c0));
    } else {
        throw std::invalid_argument("unknown policy kind '" + kind + "'");
    }
    c.horizon_t = 1;
    c.validate();
    return p;
}

inline TestVariant parse_test_variant(const std::string& s) {
    for (auto v : {TestVariant::ITK, TestVariant::IT3Prime, TestVariant::TwoPointProbe})
        if (to_string(v) == s) return v;
    throw std::invalid_argument("unknown test variant '" + s + "'");
}

inline void ExperimentConfig::validate() const {
    if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    if (horizons.empty()) throw std::invalid_argument("horizons must be nonempty");
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (horizons[i] < 1) throw std::invalid_argument("horizons must be >= 1");
        if (i > 0 && horizons[i] <= horizons[i - 1]) throw std::invalid_argument("horizons must be increasing");
    }
    if (envs.empty()) throw std::invalid_argument("at least one env is required");
    std::vector<std::string> ids;
    for (const auto& e : envs) ids.push_back(e.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw std::invalid_argument("env ids must be unique");
    ids.clear();
    for (const auto& p : policies) ids.push_back(p.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw std::invalid_argument("policy ids must be unique");
    for (double z : zetas)
        if (!(z > 0.0 && z < 1.0)) throw std::invalid_argument("zetas must lie in (0,1)");

    switch (experiment) {
        case ExperimentKind::Regret:
        case ExperimentKind::BoundCheck:
            if (policies.empty()) throw std::invalid_argument("at least one policy is required");
            for (const auto& p : policies)
                if (p.auto_delta)
                    for (const auto& e : envs)
                        if (!e.env.as_power_peak())
                            throw std::invalid_argument("kl_ucb delta 'auto' needs power-peak envs (xi unknown for " + e.id + ")");
            if (experiment == ExperimentKind::BoundCheck) {
                for (const auto& e : envs)
                    if (!e.env.as_power_peak() || e.env.model().family != RewardFamily::Bernoulli)
                        throw std::invalid_argument("bound-check needs Bernoulli power-peak envs (" + e.id + ")");
                for (const auto& p : policies)
                    if (!p.cfg.is_sp()) throw std::invalid_argument("bound-check applies to sp / sp_prime policies only");
                if (horizons.front() < 2) throw std::invalid_argument("bound-check needs horizons >= 2");
            }
            break;
        case ExperimentKind::Risk:
        case ExperimentKind::TrimLength:
            if (tests.empty()) throw std::invalid_argument("at least one test variant is required");
            for (auto t : tests)
                if (t == TestVariant::TwoPointProbe)
                    throw std::invalid_argument("risk / trim-length run the three-arm tests (ITK, IT3Prime)");
            if (experiment == ExperimentKind::Risk && zetas.empty()) throw std::invalid_argument("risk needs zetas");
            if (experiment == ExperimentKind::TrimLength && !(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
            break;
        case ExperimentKind::StallDemo:
            if (zetas.empty()) throw std::invalid_argument("stall-demo needs a zeta");
            break;
    }
}

/// Built-in configuration reproducing the standard study for each kind.
inline ExperimentConfig default_config(ExperimentKind kind) {
    using nlohmann::json;
    ExperimentConfig cfg;
    cfg.experiment = kind;
    auto peaks = [] {
        std::vector<EnvSpec> v;
        for (double xi : {0.5, 1.0, 2.0})
            v.push_back(parse_env(json{{"id", "peak_xi" + detail::fmt_num(xi)}, {"shape", "power_peak"}, {"xi", xi}}));
        return v;
    };
    switch (kind) {
        case ExperimentKind::Regret:
            cfg.envs = peaks();
            cfg.policies = {parse_policy(json{{"kind", "sp_prime"}, {"gamma", 0.6}}),
                            parse_policy(json{{"kind", "kl_ucb"}, {"delta", "auto"}}),
                            parse_policy(json{{"kind", "kw"}, {"a0", 1.0}, {"c0", 0.25}})};
            cfg.horizons = {10000, 100000};
            cfg.replicates = 10;
            break;
        case ExperimentKind::Risk:
            cfg.envs = {parse_env(json{{"id", "peak_left_x0.05"}, {"shape", "power_peak"}, {"xi", 1.0}, {"xstar", 0.05}})};
            cfg.horizons = {20000};
            cfg.zetas = {0.05, 0.1};
            cfg.replicates = 2000;
            break;
        case ExperimentKind::TrimLength:
            cfg.envs = {parse_env(json{{"id", "ramp"}, {"shape", "piecewise_linear"},
                                       {"knots", json::array({json::array({0.0, 0.2}), json::array({0.6, 0.8}),
                                                              json::array({1.0, 0.3})})}})};
            cfg.horizons = {1000, 10000, 100000};
            cfg.replicates = 500;
            break;
        case ExperimentKind::StallDemo:
            cfg.envs = {parse_env(json{{"id", "triangle"}, {"shape", "power_peak"}, {"xi", 1.0}})};
            cfg.horizons = {10000};
            cfg.zetas = {0.05};
            cfg.replicates = 500;
            break;
        case ExperimentKind::BoundCheck:
            cfg.envs = peaks();
            cfg.policies = {parse_policy(json{{"kind", "sp"}, {"gamma", 0.6}}),
                            parse_policy(json{{"kind", "sp_prime"}, {"gamma", 0.6}})};
            cfg.horizons = {10000, 100000};
            cfg.replicates = 20;
            break;
    }
    return cfg;
}

/// Parses a JSON config; fields absent from the file keep the defaults of
/// `default_config(kind)`.
inline ExperimentConfig parse_config(const nlohmann::json& j, std::optional<ExperimentKind> kind = std::nullopt) {
    const ExperimentKind k = kind ? *kind : parse_experiment_kind(j.at("experiment").get<std::string>());
    if (kind && j.contains("experiment") && parse_experiment_kind(j.at("experiment").get<std::string>()) != *kind)
        throw std::invalid_argument("config declares experiment '" + j.at("experiment").get<std::string>() +
                                    "' but '" + to_string(*kind) + "' was requested");
    ExperimentConfig cfg = default_config(k);
    if (j.contains("envs")) {
        cfg.envs.clear();
        for (const auto& e : j.at("envs")) cfg.envs.push_back(parse_env(e));
    }
    if (j.contains("policies")) {
        cfg.policies.clear();
        for (const auto& p : j.at("policies")) cfg.policies.push_back(parse_policy(p));
    }
    if (j.contains("horizons")) cfg.horizons = j.at("horizons").get<std::vector<std::int64_t>>();
    if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<int>();
    if (j.contains("base_seed")) cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("outputs")) cfg.outputs = j.at("outputs").get<std::string>();
    if (j.contains("tests")) {
        cfg.tests.clear();
        for (const auto& t : j.at("tests")) cfg.tests.push_back(parse_test_variant(t.get<std::string>()));
    }
    if (j.contains("zetas")) cfg.zetas = j.at("zetas").get<std::vector<double>>();
    if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<unsigned>();
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentKind> kind = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config " + path.string() + ": " + e.what());
    }
    return parse_config(j, kind);
}

/// Fully resolved config, enough to re-run the experiment exactly.
inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["experiment"] = to_string(cfg.experiment);
    j["envs"] = nlohmann::json::array();
    for (const auto& e : cfg.envs) {
        auto d = e.decl;
        d["id"] = e.id;
        j["envs"].push_back(d);
    }
    j["policies"] = nlohmann::json::array();
    for (const auto& p : cfg.policies) {
        auto d = p.decl;
        d["id"] = p.id;
        j["policies"].push_back(d);
    }
    j["horizons"] = cfg.horizons;
    j["replicates"] = cfg.replicates;
    j["base_seed"] = cfg.base_seed;
    j["outputs"] = cfg.outputs;
    j["tests"] = nlohmann::json::array();
    for (auto t : cfg.tests) j["tests"].push_back(to_string(t));
    j["zetas"] = cfg.zetas;
    j["gamma"] = cfg.gamma;
    return j;
}

// ---------------------------------------------------------------------------
// Execution

namespace detail {

/// Runs fn(i) for i in [0, n) on a pool of threads; fn writes its own slot.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

/// Metric values of one replicate, in a fixed order.
using Metrics = std::vector<std::pair<std::string, double>>;

// Emits replicate rows followed by aggregates (mean and sample-std / sqrt(n)),
// summing in replicate order.
inline void append_block(ResultTable& table, const std::string& env, const std::string& policy, std::int64_t horizon,
                         const std::vector<Metrics>& per_replicate) {
    if (per_replicate.empty()) return;
    const std::size_t n_metrics = per_replicate.front().size();
    for (std::size_t r = 0; r < per_replicate.size(); ++r)
        for (const auto& [name, value] : per_replicate[r])
            table.rows.push_back({env, policy, horizon, static_cast<int>(r), name, value, std::nullopt});
    const auto n = static_cast<double>(per_replicate.size());
    for (std::size_t m = 0; m < n_metrics; ++m) {
        double sum = 0.0;
        for (const auto& rep : per_replicate) sum += rep[m].second;
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& rep : per_replicate) ss += (rep[m].second - mean) * (rep[m].second - mean);
        const double se = per_replicate.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
        table.rows.push_back({env, policy, horizon, std::nullopt, per_replicate.front()[m].first, mean, se});
    }
}

inline void append_constant(ResultTable& table, const std::string& env, const std::string& policy,
                            std::int64_t horizon, const std::string& metric, double value) {
    table.rows.push_back({env, policy, horizon, std::nullopt, metric, value, std::nullopt});
}

inline std::uint64_t replicate_seed(const ExperimentConfig& cfg, int replicate) {
    return cfg.base_seed + static_cast<std::uint64_t>(replicate);
}

inline PolicyConfig resolve_policy(const PolicySpec& spec, const UnimodalEnv& env, std::int64_t horizon) {
    PolicyConfig c = spec.cfg;
    c.horizon_t = horizon;
    if (spec.auto_delta) c.delta = kl_ucb_default_delta(horizon, env.as_power_peak()->xi);
    return c;
}

inline Metrics policy_metrics(const PolicyTrace& trace, const UnimodalEnv& env, bool sp) {
    Metrics m{{"regret", trace.regret()}, {"error", final_error(trace, env)}};
    if (sp) {
        double phases = 0.0;
        for (const auto& p : trace.phases)
            if (p.decision != Decision::NoDecision) phases += 1.0;
        m.emplace_back("phases", phases);
    }
    return m;
}

inline void run_policies(const ExperimentConfig& cfg, ResultTable& table) {
    for (const auto& e : cfg.envs) {
        for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
            const auto& spec = cfg.policies[p];
            for (const auto horizon : cfg.horizons) {
                const PolicyConfig pc = resolve_policy(spec, e.env, horizon);
                std::vector<Metrics> reps(static_cast<std::size_t>(cfg.replicates));
                parallel_for(reps.size(), cfg.threads, [&](std::size_t r) {
                    Rng rng(derive_seed(replicate_seed(cfg, static_cast<int>(r)), p));
                    const PolicyTrace trace = run_policy(pc, e.env, rng);
                    reps[r] = policy_metrics(trace, e.env, pc.is_sp());
                });
                append_block(table, e.id, spec.id, horizon, reps);
                if (cfg.experiment == ExperimentKind::BoundCheck) {
                    const ClassParams cp = class_params(e.env);
                    append_constant(table, e.id, spec.id, horizon, "regret_bound",
                                    regret_bound(cp, horizon, pc.gamma, e.env.mu_star()));
                    append_constant(table, e.id, spec.id, horizon, "error_bound",
                                    error_bound(cp, horizon, pc.gamma, e.env.mu_star()));
                    append_constant(table, e.id, spec.id, horizon, "regret_bound_generic",
                                    regret_bound_generic(e.env, horizon, pc.gamma));
                }
            }
        }
    }
}

inline std::string test_id(TestVariant v, double zeta) { return to_string(v) + "@zeta=" + fmt_num(zeta); }

inline void run_risk(const ExperimentConfig& cfg, ResultTable& table) {
    std::uint64_t stream = 0;
    for (const auto& e : cfg.envs) {
        for (auto variant : cfg.tests) {
            for (double zeta : cfg.zetas) {
                for (const auto s : cfg.horizons) {
                    const std::uint64_t my_stream = stream++;
                    TrimTestConfig tc{0.0, 1.0, 3, s, zeta, variant};
                    std::vector<Metrics> reps(static_cast<std::size_t>(cfg.replicates));
                    parallel_for(reps.size(), cfg.threads, [&](std::size_t r) {
                        Rng rng(derive_seed(replicate_seed(cfg, static_cast<int>(r)), my_stream));
                        const TrimOutcome out = run_trim_test(tc, e.env, rng);
                        const bool kept = out.out_lower <= e.env.xstar() && e.env.xstar() <= out.out_upper;
                        reps[r] = {{"wrong_trim", kept ? 0.0 : 1.0},
                                   {"decided", out.decision == Decision::NoDecision ? 0.0 : 1.0},
                                   {"length", static_cast<double>(out.length)}};
                    });
                    append_block(table, e.id, test_id(variant, zeta), s, reps);
                }
            }
        }
    }
}

inline void run_trim_length(const ExperimentConfig& cfg, ResultTable& table) {
    std::uint64_t stream = 0;
    for (const auto& e : cfg.envs) {
        for (auto variant : cfg.tests) {
            for (const auto s : cfg.horizons) {
                const std::uint64_t my_stream = stream++;
                if (s < 2) throw std::invalid_argument("trim-length needs horizons >= 2");
                const double zeta = std::pow(static_cast<double>(s), -cfg.gamma);
                TrimTestConfig tc{0.0, 1.0, 3, s, zeta, variant};
                const double f = solve_threshold(s, zeta, 3);
                const double gap = trim_gap(tc, e.env);
                const double tail_at = 8.0 * f / (gap * gap);
                std::vector<Metrics> reps(static_cast<std::size_t>(cfg.replicates));
                parallel_for(reps.size(), cfg.threads, [&](std::size_t r) {
                    Rng rng(derive_seed(replicate_seed(cfg, static_cast<int>(r)), my_stream));
                    const TrimOutcome out = run_trim_test(tc, e.env, rng);
                    Metrics m{{"length", static_cast<double>(out.length)}};
                    for (std::size_t k = 0; k < 3; ++k)
                        m.emplace_back("t" + std::to_string(k + 1), static_cast<double>(out.samples_per_arm[k]));
                    for (std::size_t k = 0; k < 3; ++k)
                        m.emplace_back("tail_t" + std::to_string(k + 1),
                                       static_cast<double>(out.samples_per_arm[k]) >= tail_at ? 1.0 : 0.0);
                    reps[r] = std::move(m);
                });
                const std::string id = to_string(variant);
                append_block(table, e.id, id, s, reps);
                append_constant(table, e.id, id, s, "threshold", f);
                append_constant(table, e.id, id, s, "gap_delta", gap);
                append_constant(table, e.id, id, s, "mean_tk_bound", gap > 0.0 ? (f + 32.0) / (gap * gap) : kInfinity);
                append_constant(table, e.id, id, s, "tail_bound", 2.0 * std::exp(-f));
            }
        }
    }
}

inline void run_stall_demo(const ExperimentConfig& cfg, ResultTable& table) {
    const double zeta = cfg.zetas.front();
    std::uint64_t stream = 0;
    for (const auto& e : cfg.envs) {
        for (auto variant : {TestVariant::TwoPointProbe, TestVariant::IT3Prime}) {
            for (const auto s : cfg.horizons) {
                const std::uint64_t my_stream = stream++;
                TrimTestConfig tc{0.0, 1.0, variant == TestVariant::TwoPointProbe ? 2 : 3, s, zeta, variant};
                std::vector<Metrics> reps(static_cast<std::size_t>(cfg.replicates));
                parallel_for(reps.size(), cfg.threads, [&](std::size_t r) {
                    Rng rng(derive_seed(replicate_seed(cfg, static_cast<int>(r)), my_stream));
                    const TrimOutcome out = run_trim_test(tc, e.env, rng);
                    reps[r] = {{"no_decision", out.decision == Decision::NoDecision ? 1.0 : 0.0},
                               {"length", static_cast<double>(out.length)}};
                });
                append_block(table, e.id, test_id(variant, zeta), s, reps);
            }
        }
    }
}

}  // namespace detail

/// Runs the configured study. Replicate r uses seed base_seed + r; each
/// (replicate, policy or test) pair gets its own derived stream.
inline ResultTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ResultTable table;
    switch (cfg.experiment) {
        case ExperimentKind::Regret:
        case ExperimentKind::BoundCheck: detail::run_policies(cfg, table); break;
        case ExperimentKind::Risk: detail::run_risk(cfg, table); break;
        case ExperimentKind::TrimLength: detail::run_trim_length(cfg, table); break;
        case ExperimentKind::StallDemo: detail::run_stall_demo(cfg, table); break;
    }
    return table;
}

/// Aggregate regret / error rows exceeding their bound in a bound-check table.
inline std::vector<std::string> bound_violations(const ResultTable& table) {
    std::vector<std::string> out;
    for (const auto& r : table.rows) {
        if (r.is_aggregate()) continue;
        const char* bound = r.metric == "regret" ? "regret_bound" : r.metric == "error" ? "error_bound" : nullptr;
        if (bound == nullptr) continue;
        const double b = table.aggregate(r.env, r.policy, r.horizon, bound).value;
        if (r.value > b)
            out.push_back(r.env + "/" + r.policy + "/T=" + std::to_string(r.horizon) + "/rep=" +
                          std::to_string(*r.replicate) + ": " + r.metric + " " + detail::fmt_num(r.value) + " > " +
                          detail::fmt_num(b));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output

enum class OutputFormat { CSV, JSON };

namespace detail {

inline std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

inline constexpr const char* kCsvHeader = "env,policy,T,replicate,metric,value,stderr";

inline void write_csv(const ResultTable& table, std::ostream& os) {
    os << kCsvHeader << '\n';
    for (const auto& r : table.rows) {
        os << r.env << ',' << r.policy << ',' << r.horizon << ','
           << (r.replicate ? std::to_string(*r.replicate) : std::string("agg")) << ',' << r.metric << ','
           << detail::fmt12(r.value) << ',' << (r.stderr_ ? detail::fmt12(*r.stderr_) : std::string()) << '\n';
    }
}

inline nlohmann::json table_to_json(const ResultTable& table, const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["schema"] = table.schema;
    j["config"] = config_to_json(cfg);
    j["rows"] = nlohmann::json::array();
    for (const auto& r : table.rows) {
        nlohmann::json row{{"env", r.env}, {"policy", r.policy}, {"T", r.horizon}, {"metric", r.metric}, {"value", r.value}};
        row["replicate"] = r.replicate ? nlohmann::json(*r.replicate) : nlohmann::json("agg");
        row["stderr"] = r.stderr_ ? nlohmann::json(*r.stderr_) : nlohmann::json(nullptr);
        j["rows"].push_back(std::move(row));
    }
    return j;
}

/// Writes the table to `path` (CSV columns env,policy,T,replicate,metric,value,stderr
/// with 12 significant digits; JSON rows plus the resolved config).
inline void emit(const ResultTable& table, const ExperimentConfig& cfg, OutputFormat format,
                 const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    if (format == OutputFormat::CSV)
        write_csv(table, out);
    else
        out << table_to_json(table, cfg).dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

/// Parses a CSV produced by write_csv.
inline ResultTable read_csv(std::istream& is) {
    ResultTable table;
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) throw std::invalid_argument("not a result CSV");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() == 6) f.emplace_back();
        if (f.size() != 7) throw std::invalid_argument("malformed CSV row: " + line);
        ResultRow r;
        r.env = f[0];
        r.policy = f[1];
        r.horizon = std::stoll(f[2]);
        if (f[3] != "agg") r.replicate = std::stoi(f[3]);
        r.metric = f[4];
        r.value = std::stod(f[5]);
        if (!f[6].empty()) r.stderr_ = std::stod(f[6]);
        table.rows.push_back(std::move(r));
    }
    return table;
}

}  // namespace unibandit
