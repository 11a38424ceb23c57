// Runs SP' once on a power peak and prints each phase, then the regret
// against the closed-form guarantee.

#include <cstdio>
#include <cstdlib>

#include "unibandit/unibandit.hpp"

using namespace unibandit;

int main(int argc, char** argv) {
    const double xi = argc > 1 ? std::atof(argv[1]) : 1.0;
    const std::int64_t horizon = argc > 2 ? std::atoll(argv[2]) : 100000;
    const auto env = UnimodalEnv::power_peak(xi, 0.37);

    PolicyConfig cfg;
    cfg.kind = PolicyKind::SPPrime;
    cfg.horizon_t = horizon;
    Rng rng(derive_seed(2024, 0));
    const auto trace = run_sp(cfg, env, rng);

    std::printf("phase  interval                  length  threshold  outcome\n");
    for (std::size_t i = 0; i < trace.phases.size(); ++i) {
        const auto& p = trace.phases[i];
        std::printf("%5zu  [%.6f, %.6f]  %7lld  %9.3f  %s\n", i, p.interval.lower(), p.interval.upper(),
                    static_cast<long long>(p.length), p.threshold, to_string(p.decision).c_str());
    }
    std::printf("final arm %.6f (x* = %.2f), error %.3g\n", trace.final_arm, env.xstar(), final_error(trace, env));
    std::printf("regret %.1f, bound %.1f\n", trace.regret(),
                regret_bound(class_params(env), horizon, cfg.gamma, env.mu_star()));
    return 0;
}
