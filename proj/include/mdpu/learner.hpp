#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdpu/environment.hpp"
#include "mdpu/planning.hpp"
#include "mdpu/trace.hpp"

namespace mdpu {

/// Visit statistics for one (state, action) pair.
struct PairStats {
    std::uint64_t visits = 0;
    std::map<StateIndex, std::uint64_t> next_counts;
    std::map<StateIndex, double> reward_sums;
};

/// Learner-side bookkeeping for one discovered state.
struct ModelState {
    StateIndex env_state = 0;
    std::map<ActionIndex, PairStats> pairs;  // every action the DM is aware of here
    std::uint64_t explore_plays = 0;         // since the last discovery at this state
    double explore_reward_sum = 0.0;
};

/// The learner's optimistic approximation M'. Unknown pairs lead to a dummy
/// state with reward Rmax; known pairs carry empirical frequencies and mean
/// observed rewards. Knownness is derived from counts and the current
/// thresholds, so raising a threshold between runs un-knows pairs.
class ApproxModel {
public:
    struct Thresholds {
        std::uint64_t k1 = 1;  // visits for an ordinary pair
        std::uint64_t k0 = 1;  // plays for an explore pseudo-pair
        double rmax = 1.0;
        bool model_explore = false;
    };

    bool has_state(StateIndex env_state) const { return index_.count(env_state) != 0; }
    std::size_t add_state(StateIndex env_state);
    std::size_t index_of(StateIndex env_state) const { return index_.at(env_state); }
    std::size_t size() const { return states_.size(); }
    const ModelState& state(std::size_t i) const { return states_[i]; }
    ModelState& state(std::size_t i) { return states_[i]; }
    const std::vector<ModelState>& states() const { return states_; }

    /// Adds an action to the aware set at a model state; false if present.
    bool add_action(std::size_t model_state, ActionIndex a);

    void record(std::size_t model_state, ActionIndex a, StateIndex next, double reward);

    bool pair_known(const PairStats& p, const Thresholds& th) const { return p.visits >= effective_k1(th); }
    bool explore_known(const ModelState& s, const Thresholds& th) const { return s.explore_plays >= th.k0; }
    bool all_known(const Thresholds& th) const;

    /// Number of distinct action ids the DM is aware of (|A| as seen so far).
    std::size_t distinct_actions(const EnvAdapter& env) const;
    /// Largest reward observed on an ordinary action.
    double max_observed_reward() const { return max_reward_; }

    /// Plannable MDP: model states then the dummy state (last index).
    /// `actions_out[s][i]` maps planner action i to an env action or kExplore.
    MdpSpec build(const Thresholds& th, std::vector<std::vector<ActionIndex>>& actions_out) const;

    /// Empirical transition vector of a pair over model states.
    std::vector<double> empirical(const PairStats& p) const;

    /// Forget visit statistics, keeping awareness.
    void clear_statistics();

    static std::uint64_t effective_k1(const Thresholds& th) { return th.k1 == 0 ? 1 : th.k1; }

private:
    std::vector<ModelState> states_;
    std::map<StateIndex, std::size_t> index_;
    double max_reward_ = 0.0;
};

/// A T-step plan mapped back to environment states, played cyclically.
struct LearnedPolicy {
    std::size_t horizon = 1;
    std::map<StateIndex, std::vector<ActionIndex>> table;

    /// Action at env state s, `step` steps into the cycle. States the learner
    /// never saw fall back to the explore action.
    ActionIndex action(StateIndex s, std::size_t step) const;
};

enum class InconsistencyKind { reward_exceeds_rmax, too_many_actions, too_many_states };

const char* to_string(InconsistencyKind kind);

struct Inconsistency {
    InconsistencyKind kind;
    std::string state;
    std::string action;
    double observed = 0.0;  // reward, action count, or state count
    double bound = 0.0;
};

enum class RunStatus { converged, inconsistency, budget_exhausted };

const char* to_string(RunStatus status);

struct RunReport {
    RunStatus status = RunStatus::budget_exhausted;
    std::optional<Inconsistency> inconsistency;
    LearnedPolicy policy;
    HorizonPlan plan;
    std::uint64_t steps = 0;
    std::uint64_t discoveries = 0;
    std::uint64_t known_pairs = 0;
    std::uint64_t replans = 0;
    std::vector<std::uint64_t> discovery_steps;
};

/// Parameters of one learning run.
struct LearnerConfig {
    std::size_t horizon = 1;  // T
    double rmax = 1.0;
    std::uint64_t k1 = 1;
    std::uint64_t k0 = 1;
    bool model_explore = false;   // URMAX: treat a0 as a learnable pseudo-pair
    bool check_bounds = false;    // URMAX: stop on inconsistencies
    std::uint64_t max_states = 0; // N, when check_bounds
    std::uint64_t max_actions = 0;// k, when check_bounds
    std::uint64_t step_budget = 1'000'000;
    int round = -1;               // tags trace records when >= 0
};

/// R-MAX style explore-or-exploit loop over an ApproxModel. The same object
/// can be run repeatedly with new parameters; awareness and (unless
/// cleared) statistics carry over.
class ModelLearner {
public:
    ModelLearner(EnvAdapter& env, const std::vector<StateIndex>& initial_states, TraceLog* trace = nullptr);

    RunReport run(const LearnerConfig& cfg);

    const ApproxModel& model() const { return model_; }
    ApproxModel& model() { return model_; }
    std::uint64_t total_steps() const { return total_steps_; }
    /// Accounts for steps taken on the environment outside run().
    void add_external_steps(std::uint64_t n) { total_steps_ += n; }
    EnvAdapter& env() { return env_; }

    /// Plan on the current model for the given configuration.
    LearnedPolicy current_policy(const LearnerConfig& cfg, HorizonPlan* plan_out = nullptr) const;

private:
    std::optional<Inconsistency> observe_state(StateIndex s, const LearnerConfig& cfg);
    std::optional<Inconsistency> retained_inconsistency(const LearnerConfig& cfg) const;
    void emit(nlohmann::ordered_json rec, const LearnerConfig& cfg);

    EnvAdapter& env_;
    ApproxModel model_;
    TraceLog* trace_;
    std::uint64_t total_steps_ = 0;
};

struct ReplayStats {
    std::uint64_t steps = 0;
    double total_reward = 0.0;
    double average() const { return steps ? total_reward / static_cast<double>(steps) : 0.0; }
};

/// Executes a learned policy for `steps` steps. Explore rewards count only
/// when `include_explore_rewards` is set.
ReplayStats replay_policy(EnvAdapter& env, const LearnedPolicy& policy, std::uint64_t steps,
                          bool include_explore_rewards, TraceLog* trace = nullptr,
                          std::uint64_t step_offset = 0);

/// Exact expected T-step average of a learned policy on the true MDP, from
/// `start`. Explore plays keep the state and earn nothing.
double evaluate_learned_policy(const MdpSpec& mdp, const LearnedPolicy& policy, StateIndex start,
                               std::size_t horizon);

}  // namespace mdpu
