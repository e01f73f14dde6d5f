#include <algorithm>
#include <set>

#include "mdpu/learner.hpp"

namespace mdpu {

const char* to_string(InconsistencyKind kind) {
    switch (kind) {
        case InconsistencyKind::reward_exceeds_rmax: return "reward-exceeds-Rmax";
        case InconsistencyKind::too_many_actions: return "too-many-actions";
        case InconsistencyKind::too_many_states: return "too-many-states";
    }
    return "?";
}

const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::converged: return "converged";
        case RunStatus::inconsistency: return "inconsistency";
        case RunStatus::budget_exhausted: return "budget-exhausted";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// ApproxModel

std::size_t ApproxModel::add_state(StateIndex env_state) {
    auto [it, inserted] = index_.emplace(env_state, states_.size());
    if (inserted) states_.push_back(ModelState{env_state, {}, 0, 0.0});
    return it->second;
}

bool ApproxModel::add_action(std::size_t model_state, ActionIndex a) {
    return states_.at(model_state).pairs.emplace(a, PairStats{}).second;
}

void ApproxModel::record(std::size_t model_state, ActionIndex a, StateIndex next, double reward) {
    auto& p = states_.at(model_state).pairs.at(a);
    ++p.visits;
    ++p.next_counts[next];
    p.reward_sums[next] += reward;
    max_reward_ = std::max(max_reward_, reward);
}

bool ApproxModel::all_known(const Thresholds& th) const {
    for (const auto& s : states_) {
        for (const auto& [a, p] : s.pairs)
            if (!pair_known(p, th)) return false;
        if (th.model_explore && !explore_known(s, th)) return false;
    }
    return true;
}

std::size_t ApproxModel::distinct_actions(const EnvAdapter& env) const {
    std::set<std::string> ids;
    for (const auto& s : states_)
        for (const auto& [a, p] : s.pairs) ids.insert(env.action_name(s.env_state, a));
    return ids.size();
}

std::vector<double> ApproxModel::empirical(const PairStats& p) const {
    std::vector<double> out(states_.size(), 0.0);
    if (p.visits == 0) return out;
    for (const auto& [next, count] : p.next_counts)
        out[index_.at(next)] = static_cast<double>(count) / static_cast<double>(p.visits);
    return out;
}

MdpSpec ApproxModel::build(const Thresholds& th, std::vector<std::vector<ActionIndex>>& actions_out) const {
    const std::size_t n = states_.size();
    const std::size_t dummy = n;
    MdpSpec m;
    m.states.resize(n + 1);
    m.actions.resize(n + 1);
    m.prob.resize(n + 1);
    m.reward.resize(n + 1);
    actions_out.assign(n + 1, {});

    auto optimistic = [&](std::size_t s, ActionIndex a, const std::string& name) {
        std::vector<double> p(n + 1, 0.0), r(n + 1, 0.0);
        p[dummy] = 1.0;
        r[dummy] = th.rmax;
        m.actions[s].push_back(name);
        m.prob[s].push_back(std::move(p));
        m.reward[s].push_back(std::move(r));
        actions_out[s].push_back(a);
    };
    auto self_loop = [&](std::size_t s, double reward) {
        std::vector<double> p(n + 1, 0.0), r(n + 1, 0.0);
        p[s] = 1.0;
        r[s] = reward;
        m.actions[s].push_back(kExploreName);
        m.prob[s].push_back(std::move(p));
        m.reward[s].push_back(std::move(r));
        actions_out[s].push_back(kExplore);
    };

    // Optimistic entries come first so that planner ties (lowest index wins)
    // resolve toward exploration.
    for (std::size_t s = 0; s < n; ++s) {
        const auto& st = states_[s];
        m.states[s] = "m" + std::to_string(st.env_state);
        for (const auto& [a, p] : st.pairs)
            if (!pair_known(p, th)) optimistic(s, a, "a" + std::to_string(a));
        if (th.model_explore && !explore_known(st, th)) optimistic(s, kExplore, kExploreName);

        for (const auto& [a, p] : st.pairs) {
            if (!pair_known(p, th)) continue;
            std::vector<double> prob(n + 1, 0.0), rew(n + 1, 0.0);
            for (const auto& [next, count] : p.next_counts) {
                const auto i = index_.at(next);
                prob[i] = static_cast<double>(count) / static_cast<double>(p.visits);
                rew[i] = p.reward_sums.at(next) / static_cast<double>(count);
            }
            m.actions[s].push_back("a" + std::to_string(a));
            m.prob[s].push_back(std::move(prob));
            m.reward[s].push_back(std::move(rew));
            actions_out[s].push_back(a);
        }
        if (!m.actions[s].empty()) continue;
        // Nothing plannable here: either a retired explore with no other
        // action, or a state with no aware actions at all. Keep a self-loop.
        const double mean = th.model_explore && st.explore_plays
                                ? st.explore_reward_sum / static_cast<double>(st.explore_plays)
                                : 0.0;
        self_loop(s, mean);
    }
    m.states[dummy] = "dummy";
    {
        std::vector<double> p(n + 1, 0.0), r(n + 1, 0.0);
        p[dummy] = 1.0;
        r[dummy] = th.rmax;
        m.actions[dummy].push_back("stay");
        m.prob[dummy].push_back(std::move(p));
        m.reward[dummy].push_back(std::move(r));
        actions_out[dummy].push_back(kExplore);
    }
    return m;
}

void ApproxModel::clear_statistics() {
    for (auto& s : states_) {
        for (auto& [a, p] : s.pairs) p = PairStats{};
        s.explore_plays = 0;
        s.explore_reward_sum = 0.0;
    }
    max_reward_ = 0.0;
}

// ---------------------------------------------------------------------------
// LearnedPolicy

ActionIndex LearnedPolicy::action(StateIndex s, std::size_t step) const {
    auto it = table.find(s);
    if (it == table.end() || it->second.empty()) return kExplore;
    return it->second[step % it->second.size()];
}

// ---------------------------------------------------------------------------
// ModelLearner

namespace {

ApproxModel::Thresholds thresholds_of(const LearnerConfig& cfg) {
    return ApproxModel::Thresholds{cfg.k1, cfg.k0, cfg.rmax, cfg.model_explore};
}

}  // namespace

ModelLearner::ModelLearner(EnvAdapter& env, const std::vector<StateIndex>& initial_states, TraceLog* trace)
    : env_(env), trace_(trace) {
    for (StateIndex s : initial_states) {
        const auto i = model_.add_state(s);
        for (ActionIndex a : env_.aware_actions(s)) model_.add_action(i, a);
    }
}

void ModelLearner::emit(nlohmann::ordered_json rec, const LearnerConfig& cfg) {
    if (!trace_ || !trace_->enabled()) return;
    if (cfg.round >= 0) rec["round"] = cfg.round;
    trace_->record(std::move(rec));
}

std::optional<Inconsistency> ModelLearner::observe_state(StateIndex s, const LearnerConfig& cfg) {
    if (!model_.has_state(s)) model_.add_state(s);
    const auto i = model_.index_of(s);
    for (ActionIndex a : env_.aware_actions(s)) model_.add_action(i, a);
    if (!cfg.check_bounds) return std::nullopt;
    if (model_.size() > cfg.max_states)
        return Inconsistency{InconsistencyKind::too_many_states, env_.state_name(s), "",
                             static_cast<double>(model_.size()), static_cast<double>(cfg.max_states)};
    const auto actions = model_.distinct_actions(env_);
    if (actions > cfg.max_actions)
        return Inconsistency{InconsistencyKind::too_many_actions, env_.state_name(s), "",
                             static_cast<double>(actions), static_cast<double>(cfg.max_actions)};
    return std::nullopt;
}

std::optional<Inconsistency> ModelLearner::retained_inconsistency(const LearnerConfig& cfg) const {
    if (!cfg.check_bounds) return std::nullopt;
    if (model_.max_observed_reward() > cfg.rmax) {
        // Report the state/action that carries the largest observed reward.
        std::string state, action;
        double best = -1.0;
        for (const auto& st : model_.states())
            for (const auto& [a, p] : st.pairs)
                for (const auto& [next, sum] : p.reward_sums)
                    if (p.next_counts.at(next) && sum / static_cast<double>(p.next_counts.at(next)) > best) {
                        best = sum / static_cast<double>(p.next_counts.at(next));
                        state = env_.state_name(st.env_state);
                        action = env_.action_name(st.env_state, a);
                    }
        return Inconsistency{InconsistencyKind::reward_exceeds_rmax, state, action, model_.max_observed_reward(),
                             cfg.rmax};
    }
    const auto actions = model_.distinct_actions(env_);
    if (actions > cfg.max_actions)
        return Inconsistency{InconsistencyKind::too_many_actions, "", "", static_cast<double>(actions),
                             static_cast<double>(cfg.max_actions)};
    if (model_.size() > cfg.max_states)
        return Inconsistency{InconsistencyKind::too_many_states, "", "", static_cast<double>(model_.size()),
                             static_cast<double>(cfg.max_states)};
    return std::nullopt;
}

LearnedPolicy ModelLearner::current_policy(const LearnerConfig& cfg, HorizonPlan* plan_out) const {
    std::vector<std::vector<ActionIndex>> map;
    const auto mdp = model_.build(thresholds_of(cfg), map);
    auto plan = plan_finite_horizon_unchecked(mdp, cfg.horizon);
    LearnedPolicy policy;
    policy.horizon = cfg.horizon;
    for (std::size_t i = 0; i < model_.size(); ++i) {
        auto& row = policy.table[model_.state(i).env_state];
        row.resize(cfg.horizon);
        for (std::size_t t = 0; t < cfg.horizon; ++t) row[t] = map[i][plan.actions[t][i]];
    }
    if (plan_out) *plan_out = std::move(plan);
    return policy;
}

RunReport ModelLearner::run(const LearnerConfig& cfg) {
    if (cfg.horizon == 0) throw InvalidInput("horizon must be at least 1");
    const auto th = thresholds_of(cfg);
    RunReport rep;
    const std::uint64_t start = total_steps_;

    auto finish = [&](RunStatus status) {
        rep.status = status;
        rep.steps = total_steps_ - start;
        rep.policy = current_policy(cfg, &rep.plan);
        return rep;
    };
    auto fail = [&](const Inconsistency& inc) {
        rep.inconsistency = inc;
        nlohmann::ordered_json j;
        j["step"] = total_steps_;
        j["event"] = "inconsistency";
        j["kind"] = to_string(inc.kind);
        j["state"] = inc.state;
        j["action"] = inc.action;
        j["observed"] = inc.observed;
        j["bound"] = inc.bound;
        emit(std::move(j), cfg);
        return finish(RunStatus::inconsistency);
    };

    if (auto inc = observe_state(env_.current_state(), cfg)) return fail(*inc);
    if (auto inc = retained_inconsistency(cfg)) return fail(*inc);

    std::vector<std::vector<ActionIndex>> map;
    HorizonPlan plan;
    auto replan = [&] { plan = plan_finite_horizon_unchecked(model_.build(th, map), cfg.horizon); };
    replan();

    while (!model_.all_known(th)) {
        bool changed = false;
        for (std::size_t t = 0; t < cfg.horizon && !changed; ++t) {
            if (total_steps_ - start >= cfg.step_budget) return finish(RunStatus::budget_exhausted);

            const StateIndex s = env_.current_state();
            const auto ms = model_.index_of(s);
            const ActionIndex a = map[ms][plan.actions[t][ms]];
            const Observation obs = env_.step(a);
            const std::uint64_t step_no = total_steps_++;
            if (trace_) trace_->step(step_no, env_, s, a, obs);

            if (a == kExplore) {
                auto& st = model_.state(ms);
                ++st.explore_plays;
                st.explore_reward_sum += obs.reward;
                if (obs.discovered) {
                    ++rep.discoveries;
                    rep.discovery_steps.push_back(step_no);
                    model_.add_action(ms, *obs.discovered);
                    st.explore_plays = 0;
                    st.explore_reward_sum = 0.0;
                    if (cfg.check_bounds) {
                        const auto count = model_.distinct_actions(env_);
                        if (count > cfg.max_actions)
                            return fail(Inconsistency{InconsistencyKind::too_many_actions, env_.state_name(s),
                                                      env_.action_name(s, *obs.discovered),
                                                      static_cast<double>(count),
                                                      static_cast<double>(cfg.max_actions)});
                    }
                    changed = true;
                } else if (cfg.model_explore && st.explore_plays == th.k0) {
                    nlohmann::ordered_json j;
                    j["step"] = total_steps_;
                    j["event"] = "discovery_known";
                    j["state"] = env_.state_name(s);
                    j["plays"] = st.explore_plays;
                    emit(std::move(j), cfg);
                    changed = true;
                }
                continue;
            }

            model_.record(ms, a, obs.next_state, obs.reward);
            if (cfg.check_bounds && obs.reward > cfg.rmax)
                return fail(Inconsistency{InconsistencyKind::reward_exceeds_rmax, env_.state_name(s),
                                          env_.action_name(s, a), obs.reward, cfg.rmax});
            if (!model_.has_state(obs.next_state)) {
                if (auto inc = observe_state(obs.next_state, cfg)) return fail(*inc);
                replan();  // the plan table needs a row for the new state
            }
            const auto& pair = model_.state(ms).pairs.at(a);
            if (pair.visits == ApproxModel::effective_k1(th)) {
                ++rep.known_pairs;
                nlohmann::ordered_json j;
                j["step"] = total_steps_;
                j["event"] = "known_pair";
                j["state"] = env_.state_name(s);
                j["action"] = env_.action_name(s, a);
                j["visits"] = pair.visits;
                emit(std::move(j), cfg);
                changed = true;
            }
        }
        if (changed) {
            replan();
            ++rep.replans;
            nlohmann::ordered_json j;
            j["step"] = total_steps_;
            j["event"] = "replan";
            emit(std::move(j), cfg);
        }
    }
    return finish(RunStatus::converged);
}

// ---------------------------------------------------------------------------

ReplayStats replay_policy(EnvAdapter& env, const LearnedPolicy& policy, std::uint64_t steps,
                          bool include_explore_rewards, TraceLog* trace, std::uint64_t step_offset) {
    ReplayStats stats;
    CompensatedSum total;
    for (std::uint64_t i = 0; i < steps; ++i) {
        const StateIndex s = env.current_state();
        ActionIndex a = policy.action(s, static_cast<std::size_t>(i % policy.horizon));
        if (a != kExplore) {
            const auto aware = env.aware_actions(s);
            if (!std::binary_search(aware.begin(), aware.end(), a)) a = kExplore;
        }
        const Observation obs = env.step(a);
        if (trace) trace->step(step_offset + i, env, s, a, obs);
        if (!obs.was_explore || include_explore_rewards) total.add(obs.reward);
        ++stats.steps;
    }
    stats.total_reward = total.value();
    return stats;
}

double evaluate_learned_policy(const MdpSpec& mdp, const LearnedPolicy& policy, StateIndex start,
                               std::size_t horizon) {
    if (horizon == 0) throw InvalidInput("horizon must be at least 1");
    const std::size_t n = mdp.num_states();
    std::vector<double> dist(n, 0.0), next(n, 0.0);
    dist.at(start) = 1.0;
    double total = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            if (dist[s] == 0.0) continue;
            const ActionIndex a = policy.action(s, t % policy.horizon);
            if (a == kExplore || a >= mdp.num_actions(s)) {
                next[s] += dist[s];
                continue;
            }
            for (std::size_t s2 = 0; s2 < n; ++s2) {
                const double p = mdp.prob[s][a][s2];
                if (p == 0.0) continue;
                total += dist[s] * p * mdp.reward[s][a][s2];
                next[s2] += dist[s] * p;
            }
        }
        dist.swap(next);
    }
    return total / static_cast<double>(horizon);
}

}  // namespace mdpu
