#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdpu/discovery.hpp"
#include "mdpu/mdp.hpp"

namespace mdpu {

/// Bounds a decision maker may know in advance: N >= |S|, k >= |A|,
/// Rmax >= every reward, T >= the mixing time.
struct DeclaredBounds {
    std::optional<std::uint64_t> N;
    std::optional<std::uint64_t> k;
    std::optional<double> rmax;
    std::optional<std::uint64_t> T;
};

/// MDP with unawareness: the true MDP plus what the decision maker is
/// initially aware of, the discovery law, and explore rewards.
struct MdpuSpec {
    std::string name;
    MdpSpec mdp;
    std::vector<std::string> aware_states;                          // S0
    std::map<std::string, std::vector<std::string>> aware_actions;  // g0
    DiscoveryFamily discovery;
    std::vector<double> explore_found;      // R+, per state index
    std::vector<double> explore_not_found;  // R-, per state index
    DeclaredBounds knowledge;

    /// S0 as a membership mask over mdp.states.
    std::vector<bool> aware_state_mask() const;
    /// g0 as a per-state mask over mdp.actions[s]; empty rows outside S0.
    std::vector<std::vector<bool>> aware_action_mask() const;
    /// Number of distinct action ids the DM is initially aware of (|A0|).
    std::size_t initial_action_count() const;
    /// Number of distinct action ids in the true MDP (|A|).
    std::size_t total_action_count() const;
};

/// Everything the DM knows at a point in time.
struct DmKnowledge {
    std::vector<std::string> aware_states;
    std::map<std::string, std::vector<std::string>> aware_actions;
    DeclaredBounds bounds;

    static DmKnowledge initial(const MdpuSpec& spec);
};

ValidationReport validate_mdpu(const MdpuSpec& spec);

/// True iff `candidate` contains every state/action the DM is aware of and
/// satisfies each declared bound (|S| <= N, |A| <= k, rewards <= Rmax).
/// The mixing-time bound T has no computable check and is ignored.
bool is_compatible(const MdpSpec& candidate, const DmKnowledge& knowledge);

/// Copy of `spec` with every state and action initially known.
MdpuSpec make_fully_aware(const MdpuSpec& spec);

/// Scenario load failure. `kind` tells malformed JSON from schema problems.
class ScenarioError : public std::runtime_error {
public:
    enum class Kind { io, syntax, schema };
    ScenarioError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Parses a scenario JSON document. Schema violations are aggregated into a
/// single ScenarioError naming every offending field path.
MdpuSpec parse_scenario(const std::string& text);
MdpuSpec load_scenario(const std::string& path);

/// Serializes to the scenario schema (stable field order, trailing newline).
std::string scenario_to_json(const MdpuSpec& spec);

}  // namespace mdpu
