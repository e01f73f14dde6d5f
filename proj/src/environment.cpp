#include "mdpu/environment.hpp"

#include <algorithm>

#include "json.hpp"

namespace mdpu {

namespace {

const std::string& explore_name() {
    static const std::string name = kExploreName;
    return name;
}

}  // namespace

StateIndex resolve_start(const MdpuSpec& spec, const std::string& id) {
    const auto s = spec.mdp.state_index(id);
    if (s == MdpSpec::npos || !spec.aware_state_mask()[s])
        throw InvalidInput("start state " + id + " is not in S0");
    return s;
}

Environment::Environment(std::shared_ptr<const MdpuSpec> spec, StateIndex start, std::uint64_t seed)
    : spec_(std::move(spec)), rng_(seed) {
    const auto& mdp = spec_->mdp;
    const auto aware_states = spec_->aware_state_mask();
    if (start >= mdp.num_states() || !aware_states[start])
        throw InvalidInput("start state is not in S0");

    const auto aware = spec_->aware_action_mask();
    state_.seed = seed;
    state_.current_state = start;
    state_.failures.assign(mdp.num_states(), 0);
    state_.undiscovered.resize(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); ++s)
        for (std::size_t a = 0; a < mdp.num_actions(s); ++a)
            if (!aware[s][a]) state_.undiscovered[s].push_back(a);
}

Environment::Environment(std::shared_ptr<const MdpuSpec> spec, const EnvSnapshot& snapshot)
    : spec_(std::move(spec)), rng_(snapshot.seed), state_(snapshot) {
    const auto n = spec_->mdp.num_states();
    if (state_.current_state >= n || state_.failures.size() != n || state_.undiscovered.size() != n)
        throw InvalidInput("snapshot does not match the scenario");
}

bool Environment::is_aware(StateIndex s, ActionIndex a) const {
    if (s >= spec_->mdp.num_states() || a >= spec_->mdp.num_actions(s)) return false;
    const auto& hidden = state_.undiscovered[s];
    return !std::binary_search(hidden.begin(), hidden.end(), a);
}

std::vector<ActionIndex> Environment::aware_actions(StateIndex s) const {
    std::vector<ActionIndex> out;
    for (std::size_t a = 0; a < spec_->mdp.num_actions(s); ++a)
        if (is_aware(s, a)) out.push_back(a);
    return out;
}

const std::string& Environment::action_name(StateIndex s, ActionIndex a) const {
    if (a == kExplore) return explore_name();
    return spec_->mdp.actions.at(s).at(a);
}

StateIndex Environment::sample_next(StateIndex s, ActionIndex a) {
    const auto& p = spec_->mdp.prob[s][a];
    const double u = CounterRng::to_unit(rng_.next(CounterRng::transition, state_.transition_draws));
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t s2 = 0; s2 < p.size(); ++s2) {
        if (p[s2] <= 0.0) continue;
        acc += p[s2];
        last = s2;
        if (u < acc) return s2;
    }
    return last;  // u landed in the round-off gap below 1
}

Observation Environment::step(ActionIndex action) {
    const StateIndex s = state_.current_state;
    Observation obs;
    if (action != kExplore) {
        if (!is_aware(s, action)) {
            ++contract_faults_;
            throw ContractFault("action " + std::to_string(action) + " is not available to the DM at state " +
                                spec_->mdp.states[s]);
        }
        const StateIndex next = sample_next(s, action);
        obs.next_state = next;
        obs.reward = spec_->mdp.reward[s][action][next];
        state_.current_state = next;
        ++state_.steps;
        return obs;
    }

    obs.was_explore = true;
    obs.next_state = s;
    auto& hidden = state_.undiscovered[s];
    auto& failures = state_.failures[s];
    bool found = false;
    if (!hidden.empty()) {
        const double p = discovery_prob(spec_->discovery, hidden.size(), failures + 1);
        const double u = CounterRng::to_unit(rng_.next(CounterRng::discovery, state_.discovery_draws));
        found = u < p;
    }
    if (found) {
        const auto pick = CounterRng::to_index(rng_.next(CounterRng::reveal, state_.reveal_draws), hidden.size());
        obs.discovered = hidden[pick];
        hidden.erase(hidden.begin() + static_cast<std::ptrdiff_t>(pick));
        obs.reward = spec_->explore_found[s];
        failures = 0;
    } else {
        obs.reward = spec_->explore_not_found[s];
        ++failures;
    }
    ++state_.steps;
    return obs;
}

std::string EnvSnapshot::to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["current_state"] = current_state;
    j["steps"] = steps;
    j["transition_draws"] = transition_draws;
    j["discovery_draws"] = discovery_draws;
    j["reveal_draws"] = reveal_draws;
    j["failures"] = failures;
    j["undiscovered"] = undiscovered;
    return j.dump();
}

EnvSnapshot EnvSnapshot::from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        EnvSnapshot s;
        s.seed = j.at("seed").get<std::uint64_t>();
        s.current_state = j.at("current_state").get<StateIndex>();
        s.steps = j.at("steps").get<std::uint64_t>();
        s.transition_draws = j.at("transition_draws").get<std::uint64_t>();
        s.discovery_draws = j.at("discovery_draws").get<std::uint64_t>();
        s.reveal_draws = j.at("reveal_draws").get<std::uint64_t>();
        s.failures = j.at("failures").get<std::vector<std::uint64_t>>();
        s.undiscovered = j.at("undiscovered").get<std::vector<std::vector<ActionIndex>>>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("bad environment snapshot: ") + e.what());
    }
}

}  // namespace mdpu
