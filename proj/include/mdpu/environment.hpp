#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdpu/rng.hpp"
#include "mdpu/scenario.hpp"

namespace mdpu {

struct Observation {
    StateIndex next_state = 0;
    double reward = 0.0;
    std::optional<ActionIndex> discovered;
    bool was_explore = false;

    bool operator==(const Observation&) const = default;
};

/// Raised when a learner plays an action it is not aware of.
class ContractFault : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// What a learner may see of an environment: the current state, the actions
/// it has been made aware of, and the outcome of each step.
class EnvAdapter {
public:
    virtual ~EnvAdapter() = default;

    virtual StateIndex current_state() const = 0;
    /// Actions at s the DM is aware of, in ascending index order.
    virtual std::vector<ActionIndex> aware_actions(StateIndex s) const = 0;
    virtual Observation step(ActionIndex action) = 0;

    virtual const std::string& state_name(StateIndex s) const = 0;
    virtual const std::string& action_name(StateIndex s, ActionIndex a) const = 0;
};

/// Complete serializable state of an Environment (the spec aside).
struct EnvSnapshot {
    std::uint64_t seed = 0;
    StateIndex current_state = 0;
    std::uint64_t steps = 0;
    std::uint64_t transition_draws = 0;
    std::uint64_t discovery_draws = 0;
    std::uint64_t reveal_draws = 0;
    std::vector<std::uint64_t> failures;               // t_s per state
    std::vector<std::vector<ActionIndex>> undiscovered;  // ascending per state

    bool operator==(const EnvSnapshot&) const = default;

    /// Compact JSON with a fixed key order; byte-stable for equal snapshots.
    std::string to_json() const;
    static EnvSnapshot from_json(const std::string& text);
};

/// Seeded MDPU simulator. Known actions follow P and R; the explore action
/// keeps the state and reveals a hidden action with probability D(j, t_s + 1),
/// where j is the number of hidden actions at the state and t_s counts
/// consecutive explore failures there since the last discovery.
class Environment final : public EnvAdapter {
public:
    Environment(std::shared_ptr<const MdpuSpec> spec, StateIndex start, std::uint64_t seed);
    Environment(std::shared_ptr<const MdpuSpec> spec, const EnvSnapshot& snapshot);

    StateIndex current_state() const override { return state_.current_state; }
    std::vector<ActionIndex> aware_actions(StateIndex s) const override;
    Observation step(ActionIndex action) override;

    const std::string& state_name(StateIndex s) const override { return spec_->mdp.states.at(s); }
    const std::string& action_name(StateIndex s, ActionIndex a) const override;

    const MdpuSpec& spec() const { return *spec_; }
    std::shared_ptr<const MdpuSpec> shared_spec() const { return spec_; }
    const std::vector<ActionIndex>& undiscovered(StateIndex s) const { return state_.undiscovered.at(s); }
    std::uint64_t failure_counter(StateIndex s) const { return state_.failures.at(s); }
    std::uint64_t steps() const { return state_.steps; }
    std::uint64_t contract_faults() const { return contract_faults_; }
    bool is_aware(StateIndex s, ActionIndex a) const;

    EnvSnapshot snapshot() const { return state_; }

private:
    StateIndex sample_next(StateIndex s, ActionIndex a);

    std::shared_ptr<const MdpuSpec> spec_;
    CounterRng rng_;
    EnvSnapshot state_;
    std::uint64_t contract_faults_ = 0;
};

/// Resolves a start state id, requiring membership in S0.
StateIndex resolve_start(const MdpuSpec& spec, const std::string& id);

}  // namespace mdpu
