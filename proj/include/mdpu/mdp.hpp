#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdpu {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

/// Pseudo-action index for the explore action. Never a valid index into g_A(s).
inline constexpr ActionIndex kExplore = std::numeric_limits<ActionIndex>::max();

/// Reserved id of the explore action in scenario files and traces.
inline constexpr const char* kExploreName = "__explore__";

/// Thrown when an operation receives input that violates its contract.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Finite tabular MDP. Actions are indexed per state; `actions[s][a]` is the
/// id of the a-th action available at s. Transition and reward tables are
/// dense over next states: `prob[s][a][s']`, `reward[s][a][s']`.
struct MdpSpec {
    std::vector<std::string> states;
    std::vector<std::vector<std::string>> actions;
    std::vector<std::vector<std::vector<double>>> prob;
    std::vector<std::vector<std::vector<double>>> reward;

    std::size_t num_states() const { return states.size(); }
    std::size_t num_actions(StateIndex s) const { return actions[s].size(); }

    /// Index of a state id, or npos.
    std::size_t state_index(const std::string& id) const;
    /// Index of an action id at state s, or npos.
    std::size_t action_index(StateIndex s, const std::string& id) const;

    /// Largest reward on any transition with positive probability.
    double max_reward() const;

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
};

struct ValidationIssue {
    std::string location;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }
    void add(std::string location, std::string message) {
        issues.push_back({std::move(location), std::move(message)});
    }
    void append(const ValidationReport& other) {
        issues.insert(issues.end(), other.issues.begin(), other.issues.end());
    }
    std::string to_string() const;
};

inline constexpr double kProbabilityTolerance = 1e-9;

ValidationReport validate_spec(const MdpSpec& spec);

/// Throws InvalidInput with the joined report if the spec is invalid.
void require_valid(const MdpSpec& spec);

/// Deterministic stationary policy: `choice[s]` indexes into `actions[s]`.
struct StationaryPolicy {
    std::vector<ActionIndex> choice;
};

}  // namespace mdpu
