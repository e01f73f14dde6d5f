#include "mdpu/urmax.hpp"

#include <algorithm>
#include <limits>

namespace mdpu {

namespace {

void check_config(const UrmaxConfig& cfg) {
    if (cfg.N == 0 || cfg.k == 0) throw InvalidInput("N and k must be positive");
    if (!(cfg.rmax > 0.0) || !(cfg.epsilon > 0.0)) throw InvalidInput("Rmax and epsilon must be positive");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
    if (cfg.horizon == 0) throw InvalidInput("horizon must be at least 1");
}

}  // namespace

UrmaxOutcome urmax_thresholds(const DiscoveryFamily& fam, const UrmaxConfig& cfg) {
    check_config(cfg);
    UrmaxOutcome out;
    out.k0_formula = k0(fam, static_cast<double>(cfg.N), cfg.delta);
    out.k1_formula = k1_urmax(static_cast<double>(cfg.N), static_cast<double>(cfg.k),
                              static_cast<double>(cfg.horizon), cfg.rmax, cfg.epsilon, cfg.delta);
    out.k0_used = cfg.k0_override ? *cfg.k0_override : out.k0_formula.clamped();
    out.k1_used = cfg.k1_override ? *cfg.k1_override : out.k1_formula.clamped();
    return out;
}

UrmaxOutcome urmax_inner(ModelLearner& learner, const DiscoveryFamily& fam, const UrmaxConfig& cfg, int round) {
    UrmaxOutcome out = urmax_thresholds(fam, cfg);
    LearnerConfig lc;
    lc.horizon = cfg.horizon;
    lc.rmax = cfg.rmax;
    lc.k1 = out.k1_used;
    lc.k0 = out.k0_used;
    lc.model_explore = true;
    lc.check_bounds = true;
    lc.max_states = cfg.N;
    lc.max_actions = cfg.k;
    lc.step_budget = cfg.step_budget;
    lc.round = round;
    out.report = learner.run(lc);
    return out;
}

UrmaxOutcome urmax_inner(EnvAdapter& env, const std::vector<StateIndex>& initial_states,
                         const DiscoveryFamily& fam, const UrmaxConfig& cfg, TraceLog* trace) {
    ModelLearner learner(env, initial_states, trace);
    return urmax_inner(learner, fam, cfg);
}

std::vector<RoundResult> urmax_outer(EnvAdapter& env, const std::vector<StateIndex>& initial_states,
                                     const DiscoveryFamily& fam, const OuterConfig& cfg, TraceLog* trace) {
    if (cfg.rounds == 0) throw InvalidInput("round budget must be at least 1");
    ModelLearner learner(env, initial_states, trace);
    const std::uint64_t n0 = learner.model().size();
    const std::uint64_t k0_count = learner.model().distinct_actions(env);

    std::vector<RoundResult> rounds;
    for (std::uint64_t r = 0; r < cfg.rounds; ++r) {
        RoundResult rr;
        rr.round = static_cast<int>(r);
        rr.params.N = std::max<std::uint64_t>(n0, 1) + r;
        rr.params.k = std::max<std::uint64_t>(k0_count, 1) + r;
        rr.params.rmax = 1.0 + static_cast<double>(r);
        rr.params.horizon = 1 + r;
        rr.params.epsilon = cfg.epsilon;
        rr.params.delta = cfg.delta;
        rr.params.step_budget = cfg.step_budget;
        rr.params.k0_override = cfg.k0_override;
        rr.params.k1_override = cfg.k1_override;

        if (trace && trace->enabled()) {
            nlohmann::ordered_json j;
            j["step"] = learner.total_steps();
            j["event"] = "round_start";
            j["round"] = rr.round;
            j["params"] = {{"N", rr.params.N}, {"k", rr.params.k}, {"rmax", rr.params.rmax},
                           {"T", rr.params.horizon}};
            trace->record(std::move(j));
        }
        if (!cfg.retain_statistics) learner.model().clear_statistics();

        rr.outcome = urmax_inner(learner, fam, rr.params, rr.round);
        rr.replay_formula = k2_k3(static_cast<double>(rr.params.N), static_cast<double>(rr.params.k),
                                  static_cast<double>(rr.params.horizon), rr.params.rmax, cfg.epsilon,
                                  cfg.delta, rr.outcome.k0_formula);

        if (rr.outcome.report.status != RunStatus::inconsistency) {
            if (cfg.replay_override) {
                rr.replay_steps = *cfg.replay_override;
            } else {
                const auto k2 = rr.replay_formula.k2.clamped();
                const auto k3 = rr.replay_formula.k3.clamped();
                const auto sum = k2 > std::numeric_limits<std::uint64_t>::max() - k3
                                     ? std::numeric_limits<std::uint64_t>::max()
                                     : k2 + k3;
                rr.replay_steps = std::min(sum, cfg.replay_cap);
            }
            rr.exploitation = replay_policy(env, rr.outcome.report.policy, rr.replay_steps,
                                            cfg.include_explore_rewards, trace, learner.total_steps());
            learner.add_external_steps(rr.exploitation.steps);
        }
        rounds.push_back(std::move(rr));
    }
    return rounds;
}

}  // namespace mdpu
