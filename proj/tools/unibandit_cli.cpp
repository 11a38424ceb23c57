#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "unibandit/harness.hpp"

namespace ub = unibandit;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitBoundViolated = 3;

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir{"."};
    std::optional<int> replicates;
    std::optional<std::int64_t> horizon;
    std::optional<unsigned> threads;
    std::string format{"both"};
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "JSON experiment config; omitted fields keep the built-in defaults")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "base seed (replicate r uses seed + r)");
    sub->add_option("--out-dir", o.out_dir, "directory for the result files");
    sub->add_option("--replicates", o.replicates, "number of Monte Carlo replicates");
    sub->add_option("--horizon", o.horizon, "run a single horizon T (or test budget s)");
    sub->add_option("--threads", o.threads, "worker threads (0: all cores)");
    sub->add_option("--format", o.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
}

int run(ub::ExperimentKind kind, const Overrides& o) {
    ub::ExperimentConfig cfg = o.config.empty() ? ub::default_config(kind) : ub::load_config(o.config, kind);
    if (o.seed) cfg.base_seed = *o.seed;
    if (o.replicates) cfg.replicates = *o.replicates;
    if (o.horizon) cfg.horizons = {*o.horizon};
    if (o.threads) cfg.threads = *o.threads;
    cfg.validate();

    const ub::ResultTable table = ub::run_experiment(cfg);
    const std::filesystem::path dir(o.out_dir);
    if (o.format != "json") {
        const auto path = dir / (cfg.outputs + ".csv");
        ub::emit(table, cfg, ub::OutputFormat::CSV, path);
        std::cerr << "wrote " << path.string() << '\n';
    }
    if (o.format != "csv") {
        const auto path = dir / (cfg.outputs + ".json");
        ub::emit(table, cfg, ub::OutputFormat::JSON, path);
        std::cerr << "wrote " << path.string() << '\n';
    }

    if (kind == ub::ExperimentKind::BoundCheck) {
        const auto violations = ub::bound_violations(table);
        for (const auto& v : violations) std::cerr << "bound violated: " << v << '\n';
        if (!violations.empty()) return kExitBoundViolated;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo experiments for unimodal continuous-armed bandits"};
    app.require_subcommand(1);

    struct Entry {
        ub::ExperimentKind kind;
        const char* help;
        Overrides overrides;
        CLI::App* sub{nullptr};
    };
    Entry entries[] = {
        {ub::ExperimentKind::Regret, "pseudo-regret and final error of the configured policies", {}},
        {ub::ExperimentKind::Risk, "wrong-trim frequency of the three-arm tests", {}},
        {ub::ExperimentKind::TrimLength, "per-arm sample counts of the three-arm tests against their bounds", {}},
        {ub::ExperimentKind::StallDemo, "two-arm probe versus the three-arm test on a symmetric peak", {}},
        {ub::ExperimentKind::BoundCheck, "empirical regret and error of SP / SP' against the closed-form bounds", {}},
    };
    for (auto& e : entries) {
        e.sub = app.add_subcommand(ub::to_string(e.kind), e.help);
        add_common(e.sub, e.overrides);
    }

    CLI11_PARSE(app, argc, argv);

    for (auto& e : entries) {
        if (!e.sub->parsed()) continue;
        try {
            return run(e.kind, e.overrides);
        } catch (const std::invalid_argument& ex) {
            std::cerr << "invalid configuration: " << ex.what() << '\n';
            return kExitInvalid;
        } catch (const std::domain_error& ex) {
            std::cerr << "invalid configuration: " << ex.what() << '\n';
            return kExitInvalid;
        } catch (const nlohmann::json::exception& ex) {
            std::cerr << "invalid configuration: " << ex.what() << '\n';
            return kExitInvalid;
        } catch (const std::exception& ex) {
            std::cerr << "error: " << ex.what() << '\n';
            return 1;
        }
    }
    return 1;
}
