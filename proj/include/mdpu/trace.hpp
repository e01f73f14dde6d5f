#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mdpu/environment.hpp"

namespace mdpu {

/// Append-only run log, one JSON object per line. Step records follow
/// {"step","state","action","next","reward","event","revealed"?}; learner
/// bookkeeping records carry "event" plus event-specific fields.
class TraceLog {
public:
    explicit TraceLog(bool enabled = true) : enabled_(enabled) {}

    bool enabled() const { return enabled_; }

    void step(std::uint64_t step, const EnvAdapter& env, StateIndex from, ActionIndex action,
              const Observation& obs);
    void record(nlohmann::ordered_json line);

    const std::vector<std::string>& lines() const { return lines_; }
    std::string jsonl() const;
    std::size_t count(std::string_view event) const;

private:
    bool enabled_;
    std::vector<std::string> lines_;
    std::vector<std::string> events_;
};

}  // namespace mdpu
