#pragma once

#include <cstdint>
#include <optional>

#include "mdpu/bounds.hpp"
#include "mdpu/learner.hpp"

namespace mdpu {

struct RmaxConfig {
    std::size_t num_states = 1;
    std::size_t num_actions = 1;
    double rmax = 1.0;
    std::size_t horizon = 1;
    double epsilon = 1.0;
    double delta = 0.1;
    std::uint64_t step_budget = 1'000'000;
    /// Replaces the formula K1. Zero means "one pass": every pair becomes
    /// known on its first visit.
    std::optional<std::uint64_t> k1_override;
};

struct RmaxResult {
    RunReport report;
    ExtendedCount k1_formula;
    std::uint64_t k1_used = 0;
};

/// R-MAX on a fully aware environment, starting from its current state.
/// The explore action is never played.
RmaxResult rmax_run(EnvAdapter& env, const RmaxConfig& cfg, TraceLog* trace = nullptr);

}  // namespace mdpu
