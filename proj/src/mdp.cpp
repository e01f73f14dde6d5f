#include "mdpu/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mdpu {

std::size_t MdpSpec::state_index(const std::string& id) const {
    auto it = std::find(states.begin(), states.end(), id);
    return it == states.end() ? npos : static_cast<std::size_t>(it - states.begin());
}

std::size_t MdpSpec::action_index(StateIndex s, const std::string& id) const {
    const auto& acts = actions.at(s);
    auto it = std::find(acts.begin(), acts.end(), id);
    return it == acts.end() ? npos : static_cast<std::size_t>(it - acts.begin());
}

double MdpSpec::max_reward() const {
    double best = 0.0;
    for (std::size_t s = 0; s < prob.size(); ++s)
        for (std::size_t a = 0; a < prob[s].size(); ++a)
            for (std::size_t n = 0; n < prob[s][a].size(); ++n)
                if (prob[s][a][n] > 0.0) best = std::max(best, reward[s][a][n]);
    return best;
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < issues.size(); ++i) {
        if (i) out << "; ";
        out << issues[i].location << ": " << issues[i].message;
    }
    return out.str();
}

namespace {

std::string pair_location(const MdpSpec& spec, std::size_t s, std::size_t a) {
    std::string loc = "(" + spec.states[s] + ", ";
    loc += a < spec.actions[s].size() ? spec.actions[s][a] : std::to_string(a);
    return loc + ")";
}

}  // namespace

ValidationReport validate_spec(const MdpSpec& spec) {
    ValidationReport report;
    const std::size_t n = spec.states.size();
    if (n == 0) report.add("states", "no states");
    if (spec.actions.size() != n)
        report.add("actions", "action table has " + std::to_string(spec.actions.size()) +
                                  " rows for " + std::to_string(n) + " states");
    if (spec.prob.size() != n || spec.reward.size() != n) {
        report.add("transitions", "transition/reward tables do not cover every state");
        return report;
    }
    if (!report.ok()) return report;

    for (std::size_t s = 0; s < n; ++s) {
        if (std::count(spec.states.begin(), spec.states.end(), spec.states[s]) > 1)
            report.add(spec.states[s], "duplicate state id");
        const auto& acts = spec.actions[s];
        for (std::size_t a = 0; a < acts.size(); ++a) {
            if (acts[a] == kExploreName)
                report.add(pair_location(spec, s, a), "reserved explore id used as an action");
            if (std::count(acts.begin(), acts.end(), acts[a]) > 1 &&
                std::find(acts.begin(), acts.end(), acts[a]) - acts.begin() ==
                    static_cast<std::ptrdiff_t>(a))
                report.add(pair_location(spec, s, a), "duplicate action id");
        }
        if (spec.prob[s].size() != acts.size() || spec.reward[s].size() != acts.size()) {
            report.add(spec.states[s], "transition/reward entries do not match the action set");
            continue;
        }
        for (std::size_t a = 0; a < acts.size(); ++a) {
            const auto& p = spec.prob[s][a];
            const auto& r = spec.reward[s][a];
            if (p.size() != n || r.size() != n) {
                report.add(pair_location(spec, s, a), "transition row length differs from state count");
                continue;
            }
            double mass = 0.0;
            bool bad_entry = false;
            for (std::size_t t = 0; t < n; ++t) {
                if (!(p[t] >= 0.0) || !std::isfinite(p[t])) bad_entry = true;
                mass += p[t];
                if (!(r[t] >= 0.0) || !std::isfinite(r[t])) {
                    std::ostringstream msg;
                    msg << "negative reward " << r[t] << " to " << spec.states[t];
                    report.add(pair_location(spec, s, a), msg.str());
                }
            }
            if (bad_entry) report.add(pair_location(spec, s, a), "probability outside [0, 1]");
            if (std::abs(mass - 1.0) > kProbabilityTolerance) {
                std::ostringstream msg;
                msg << "probability mass " << mass << " != 1";
                report.add(pair_location(spec, s, a), msg.str());
            }
        }
    }
    return report;
}

void require_valid(const MdpSpec& spec) {
    auto report = validate_spec(spec);
    if (!report.ok()) throw InvalidInput("invalid MDP: " + report.to_string());
}

}  // namespace mdpu
