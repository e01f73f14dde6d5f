#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mdpu/bounds.hpp"
#include "mdpu/learner.hpp"

namespace mdpu {

/// Parameters of one URMAX inner run.
struct UrmaxConfig {
    std::uint64_t N = 1;  // state bound
    std::uint64_t k = 1;  // action bound
    double rmax = 1.0;
    std::size_t horizon = 1;
    double epsilon = 1.0;
    double delta = 0.1;
    std::uint64_t step_budget = 1'000'000;
    std::optional<std::uint64_t> k0_override;
    std::optional<std::uint64_t> k1_override;
};

struct UrmaxOutcome {
    RunReport report;
    ExtendedCount k0_formula;
    ExtendedCount k1_formula;
    std::uint64_t k0_used = 0;
    std::uint64_t k1_used = 0;
};

/// Resolved K0/K1 for a configuration: the override when given, else the
/// formula value (saturating).
UrmaxOutcome urmax_thresholds(const DiscoveryFamily& fam, const UrmaxConfig& cfg);

/// One inner run on an existing learner, so awareness and statistics carry
/// over between calls. `round` tags trace records when >= 0.
UrmaxOutcome urmax_inner(ModelLearner& learner, const DiscoveryFamily& fam, const UrmaxConfig& cfg,
                         int round = -1);

/// Fresh inner run from the environment's current state with awareness S0.
UrmaxOutcome urmax_inner(EnvAdapter& env, const std::vector<StateIndex>& initial_states,
                         const DiscoveryFamily& fam, const UrmaxConfig& cfg, TraceLog* trace = nullptr);

struct OuterConfig {
    double epsilon = 1.0;
    double delta = 0.1;
    std::uint64_t rounds = 5;
    std::uint64_t step_budget = 1'000'000;  // per inner run
    std::optional<std::uint64_t> k0_override;
    std::optional<std::uint64_t> k1_override;
    /// Replaces K2 + K3 as the exploitation length.
    std::optional<std::uint64_t> replay_override;
    /// Ceiling on exploitation steps when the formula length is used.
    std::uint64_t replay_cap = 1'000'000;
    /// False restarts every round from empty visit statistics.
    bool retain_statistics = true;
    bool include_explore_rewards = false;
};

struct RoundResult {
    int round = 0;
    UrmaxConfig params;
    UrmaxOutcome outcome;
    ReplayLengths replay_formula;
    std::uint64_t replay_steps = 0;
    ReplayStats exploitation;
};

/// Outer loop: round r runs the inner algorithm with N = |S0| + r,
/// k = |A0| + r, Rmax = 1 + r, T = 1 + r and, absent an inconsistency,
/// exploits the resulting policy for K2 + K3 steps.
std::vector<RoundResult> urmax_outer(EnvAdapter& env, const std::vector<StateIndex>& initial_states,
                                     const DiscoveryFamily& fam, const OuterConfig& cfg,
                                     TraceLog* trace = nullptr);

}  // namespace mdpu
