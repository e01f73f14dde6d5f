#pragma once

#include <cstdint>
#include <vector>

#include "mdpu/mdp.hpp"

namespace mdpu {

/// Finite-horizon optimal plan. `values[t][s]` is the optimal expected total
/// reward collected over steps t..T-1 starting from s (so `values[T]` is all
/// zeros). `actions[t][s]` is the maximizing action at step t.
struct HorizonPlan {
    std::size_t horizon = 0;
    std::vector<std::vector<double>> values;
    std::vector<std::vector<ActionIndex>> actions;

    double average_value(StateIndex s) const { return values[0][s] / static_cast<double>(horizon); }
};

/// Backward induction over a T-step horizon. Ties go to the lowest action
/// index. Throws InvalidInput for an invalid spec or T == 0.
HorizonPlan plan_finite_horizon(const MdpSpec& spec, std::size_t horizon);

/// Planner without the validity check, for callers that build models
/// internally and maintain the invariants themselves.
HorizonPlan plan_finite_horizon_unchecked(const MdpSpec& spec, std::size_t horizon);

/// U_M(s, pi, T): expected T-step average reward of a stationary policy.
double evaluate_policy(const MdpSpec& spec, const StationaryPolicy& policy, StateIndex start,
                       std::size_t horizon);

/// Expected T-step total reward from every start state at once.
std::vector<double> policy_total_rewards(const MdpSpec& spec, const StationaryPolicy& policy,
                                         std::size_t horizon);

struct OracleResult {
    double value = 0.0;
    StationaryPolicy policy;
    std::uint64_t policies_enumerated = 0;
};

inline constexpr std::uint64_t kDefaultOracleCap = 1'000'000;

/// Exhaustive search over stationary deterministic policies maximizing
/// min_s U_M(s, pi, T_eval). Throws InvalidInput if the policy count exceeds
/// `cap` ("instance too large for oracle").
OracleResult opt_oracle(const MdpSpec& spec, std::size_t eval_horizon,
                        std::uint64_t cap = kDefaultOracleCap);

}  // namespace mdpu
