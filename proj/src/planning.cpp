#include "mdpu/planning.hpp"

#include <algorithm>
#include <cmath>

namespace mdpu {

namespace {

// Strictly better beyond round-off; keeps tie-breaking on the lowest index.
bool improves(double candidate, double best) {
    return candidate > best + 1e-12 * std::max(1.0, std::abs(best));
}

void check_policy(const MdpSpec& spec, const StationaryPolicy& policy) {
    if (policy.choice.size() != spec.num_states())
        throw InvalidInput("policy covers " + std::to_string(policy.choice.size()) + " states, MDP has " +
                           std::to_string(spec.num_states()));
    for (std::size_t s = 0; s < spec.num_states(); ++s)
        if (policy.choice[s] >= spec.num_actions(s))
            throw InvalidInput("policy selects an unavailable action at state " + spec.states[s]);
}

}  // namespace

HorizonPlan plan_finite_horizon_unchecked(const MdpSpec& spec, std::size_t horizon) {
    if (horizon == 0) throw InvalidInput("horizon must be at least 1");
    const std::size_t n = spec.num_states();
    HorizonPlan plan;
    plan.horizon = horizon;
    plan.values.assign(horizon + 1, std::vector<double>(n, 0.0));
    plan.actions.assign(horizon, std::vector<ActionIndex>(n, 0));

    for (std::size_t t = horizon; t-- > 0;) {
        const auto& next = plan.values[t + 1];
        for (std::size_t s = 0; s < n; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            ActionIndex best_a = 0;
            for (std::size_t a = 0; a < spec.num_actions(s); ++a) {
                const auto& p = spec.prob[s][a];
                const auto& r = spec.reward[s][a];
                double q = 0.0;
                for (std::size_t s2 = 0; s2 < n; ++s2)
                    if (p[s2] > 0.0) q += p[s2] * (r[s2] + next[s2]);
                if (a == 0 || improves(q, best)) {
                    best = q;
                    best_a = a;
                }
            }
            plan.values[t][s] = spec.num_actions(s) ? best : 0.0;
            plan.actions[t][s] = best_a;
        }
    }
    return plan;
}

HorizonPlan plan_finite_horizon(const MdpSpec& spec, std::size_t horizon) {
    require_valid(spec);
    return plan_finite_horizon_unchecked(spec, horizon);
}

std::vector<double> policy_total_rewards(const MdpSpec& spec, const StationaryPolicy& policy,
                                         std::size_t horizon) {
    check_policy(spec, policy);
    const std::size_t n = spec.num_states();
    std::vector<double> value(n, 0.0), next(n, 0.0);
    for (std::size_t t = 0; t < horizon; ++t) {
        for (std::size_t s = 0; s < n; ++s) {
            const auto a = policy.choice[s];
            const auto& p = spec.prob[s][a];
            const auto& r = spec.reward[s][a];
            double q = 0.0;
            for (std::size_t s2 = 0; s2 < n; ++s2)
                if (p[s2] > 0.0) q += p[s2] * (r[s2] + value[s2]);
            next[s] = q;
        }
        value.swap(next);
    }
    return value;
}

double evaluate_policy(const MdpSpec& spec, const StationaryPolicy& policy, StateIndex start,
                       std::size_t horizon) {
    require_valid(spec);
    check_policy(spec, policy);
    if (horizon == 0) throw InvalidInput("horizon must be at least 1");
    if (start >= spec.num_states()) throw InvalidInput("start state out of range");

    // Forward recursion over the state distribution of the induced chain.
    const std::size_t n = spec.num_states();
    std::vector<double> dist(n, 0.0), next(n, 0.0);
    dist[start] = 1.0;
    double total = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            if (dist[s] == 0.0) continue;
            const auto a = policy.choice[s];
            const auto& p = spec.prob[s][a];
            const auto& r = spec.reward[s][a];
            for (std::size_t s2 = 0; s2 < n; ++s2) {
                if (p[s2] == 0.0) continue;
                const double mass = dist[s] * p[s2];
                total += mass * r[s2];
                next[s2] += mass;
            }
        }
        dist.swap(next);
    }
    return total / static_cast<double>(horizon);
}

OracleResult opt_oracle(const MdpSpec& spec, std::size_t eval_horizon, std::uint64_t cap) {
    require_valid(spec);
    if (eval_horizon == 0) throw InvalidInput("horizon must be at least 1");
    const std::size_t n = spec.num_states();

    std::uint64_t count = 1;
    for (std::size_t s = 0; s < n; ++s) {
        const std::uint64_t k = spec.num_actions(s);
        if (k == 0) throw InvalidInput("state " + spec.states[s] + " has no actions");
        if (count > cap / k) throw InvalidInput("instance too large for oracle");
        count *= k;
    }
    if (count > cap) throw InvalidInput("instance too large for oracle");

    OracleResult result;
    result.value = -std::numeric_limits<double>::infinity();
    StationaryPolicy current{std::vector<ActionIndex>(n, 0)};
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto totals = policy_total_rewards(spec, current, eval_horizon);
        const double worst = *std::min_element(totals.begin(), totals.end()) /
                             static_cast<double>(eval_horizon);
        if (i == 0 || improves(worst, result.value)) {
            result.value = worst;
            result.policy = current;
        }
        // Odometer increment, last state varies fastest.
        for (std::size_t s = n; s-- > 0;) {
            if (++current.choice[s] < spec.num_actions(s)) break;
            current.choice[s] = 0;
        }
    }
    result.policies_enumerated = count;
    return result;
}

}  // namespace mdpu
