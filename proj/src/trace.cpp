#include "mdpu/trace.hpp"

#include <algorithm>

namespace mdpu {

void TraceLog::step(std::uint64_t step, const EnvAdapter& env, StateIndex from, ActionIndex action,
                    const Observation& obs) {
    if (!enabled_) return;
    nlohmann::ordered_json j;
    j["step"] = step;
    j["state"] = env.state_name(from);
    j["action"] = env.action_name(from, action);
    j["next"] = env.state_name(obs.next_state);
    j["reward"] = obs.reward;
    if (!obs.was_explore) {
        j["event"] = "move";
    } else if (obs.discovered) {
        j["event"] = "discovery";
        j["revealed"] = env.action_name(from, *obs.discovered);
    } else {
        j["event"] = "explore_fail";
    }
    record(std::move(j));
}

void TraceLog::record(nlohmann::ordered_json line) {
    if (!enabled_) return;
    events_.push_back(line.value("event", ""));
    lines_.push_back(line.dump());
}

std::string TraceLog::jsonl() const {
    std::string out;
    for (const auto& l : lines_) {
        out += l;
        out += '\n';
    }
    return out;
}

std::size_t TraceLog::count(std::string_view event) const {
    return static_cast<std::size_t>(std::count(events_.begin(), events_.end(), event));
}

}  // namespace mdpu
