#include "mdpu/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "mdpu/environment.hpp"
#include "mdpu/log.hpp"
#include "mdpu/planning.hpp"
#include "mdpu/rmax.hpp"
#include "mdpu/urmax.hpp"

namespace mdpu {

const char* to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::rmax: return "rmax";
        case Algorithm::urmax_inner: return "urmax-inner";
        case Algorithm::urmax_outer: return "urmax-outer";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "rmax") return Algorithm::rmax;
    if (name == "urmax-inner") return Algorithm::urmax_inner;
    if (name == "urmax-outer") return Algorithm::urmax_outer;
    throw InvalidInput("unknown algorithm '" + name + "' (expected rmax, urmax-inner or urmax-outer)");
}

SeedRange SeedRange::parse(const std::string& text) {
    auto number = [&](std::string_view s) {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
            throw InvalidInput("malformed seed range '" + text + "' (expected A..B)");
        return v;
    };
    SeedRange r;
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        r.first = r.last = number(text);
    } else {
        r.first = number(std::string_view(text).substr(0, dots));
        r.last = number(std::string_view(text).substr(dots + 2));
    }
    if (r.last < r.first) throw InvalidInput("empty seed range '" + text + "'");
    return r;
}

std::string format_number(double x) {
    if (x == 0.0) return "0";  // folds -0
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

namespace {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

double default_rmax(const MdpuSpec& spec) {
    const double r = spec.mdp.max_reward();
    return r > 0.0 ? r : 1.0;
}

std::vector<StateIndex> aware_indices(const MdpuSpec& spec) {
    std::vector<StateIndex> out;
    const auto mask = spec.aware_state_mask();
    for (std::size_t s = 0; s < mask.size(); ++s)
        if (mask[s]) out.push_back(s);
    return out;
}

void note_inconsistency(SeedRow& row, const RunReport& rep) {
    if (rep.status != RunStatus::inconsistency || !rep.inconsistency) return;
    ++row.inconsistencies;
    ++row.inconsistency_kinds[to_string(rep.inconsistency->kind)];
}

std::uint64_t replay_length(const ExperimentPlan& plan) {
    return std::min<std::uint64_t>(plan.replay_override.value_or(10'000), plan.max_steps);
}

SeedRow run_seed(const ExperimentPlan& plan, const std::shared_ptr<const MdpuSpec>& spec, StateIndex start,
                 std::optional<double> oracle, std::uint64_t seed) {
    SeedRow row;
    row.seed = seed;
    TraceLog trace(plan.keep_traces || !plan.out_dir.empty());
    const auto& kn = spec->knowledge;
    LearnedPolicy final_policy;
    bool have_policy = false;
    std::uint64_t contract_faults = 0;

    try {
        switch (plan.algorithm) {
            case Algorithm::rmax: {
                auto full = std::make_shared<const MdpuSpec>(make_fully_aware(*spec));
                Environment env(full, start, seed);
                RmaxConfig cfg;
                cfg.num_states = spec->mdp.num_states();
                cfg.num_actions = spec->total_action_count();
                cfg.rmax = kn.rmax.value_or(default_rmax(*spec));
                cfg.horizon = kn.T.value_or(1);
                cfg.epsilon = plan.epsilon;
                cfg.delta = plan.delta;
                cfg.step_budget = plan.max_steps;
                cfg.k1_override = plan.k1_override;
                auto res = rmax_run(env, cfg, &trace);
                row.status = to_string(res.report.status);
                row.discoveries = 0;
                row.rounds = 1;
                if (res.report.status == RunStatus::converged) row.convergence_round = 0;
                const auto stats = replay_policy(env, res.report.policy, replay_length(plan),
                                                 plan.include_explore_rewards, &trace, res.report.steps);
                row.avg_reward = stats.average();
                row.steps = env.steps();
                final_policy = res.report.policy;
                have_policy = true;
                contract_faults = env.contract_faults();
                break;
            }
            case Algorithm::urmax_inner: {
                Environment env(spec, start, seed);
                UrmaxConfig cfg;
                cfg.N = kn.N.value_or(spec->mdp.num_states());
                cfg.k = kn.k.value_or(spec->total_action_count());
                cfg.rmax = kn.rmax.value_or(default_rmax(*spec));
                cfg.horizon = kn.T.value_or(1);
                cfg.epsilon = plan.epsilon;
                cfg.delta = plan.delta;
                cfg.step_budget = plan.max_steps;
                cfg.k0_override = plan.k0_override;
                cfg.k1_override = plan.k1_override;
                auto res = urmax_inner(env, aware_indices(*spec), spec->discovery, cfg, &trace);
                row.status = to_string(res.report.status);
                row.discoveries = res.report.discoveries;
                row.discovery_steps = res.report.discovery_steps;
                row.rounds = 1;
                note_inconsistency(row, res.report);
                if (res.report.status == RunStatus::converged) row.convergence_round = 0;
                if (res.report.status != RunStatus::inconsistency) {
                    const auto stats = replay_policy(env, res.report.policy, replay_length(plan),
                                                     plan.include_explore_rewards, &trace, res.report.steps);
                    row.avg_reward = stats.average();
                }
                row.steps = env.steps();
                final_policy = res.report.policy;
                have_policy = true;
                contract_faults = env.contract_faults();
                break;
            }
            case Algorithm::urmax_outer: {
                Environment env(spec, start, seed);
                OuterConfig cfg;
                cfg.epsilon = plan.epsilon;
                cfg.delta = plan.delta;
                cfg.rounds = plan.rounds;
                cfg.step_budget = plan.max_steps;
                cfg.k0_override = plan.k0_override;
                cfg.k1_override = plan.k1_override;
                cfg.replay_override = plan.replay_override;
                cfg.replay_cap = plan.max_steps;
                cfg.include_explore_rewards = plan.include_explore_rewards;
                const auto rounds = urmax_outer(env, aware_indices(*spec), spec->discovery, cfg, &trace);
                row.rounds = rounds.size();
                for (const auto& rr : rounds) {
                    const auto& rep = rr.outcome.report;
                    row.discoveries += rep.discoveries;
                    for (auto s : rep.discovery_steps) row.discovery_steps.push_back(s);
                    note_inconsistency(row, rep);
                    if (rep.status == RunStatus::converged && !row.convergence_round)
                        row.convergence_round = static_cast<std::uint64_t>(rr.round);
                    if (rr.exploitation.steps > 0) row.avg_reward = rr.exploitation.average();
                    row.status = to_string(rep.status);
                    if (rep.status != RunStatus::inconsistency) {
                        final_policy = rep.policy;
                        have_policy = true;
                    }
                }
                row.steps = env.steps();
                contract_faults = env.contract_faults();
                break;
            }
        }
    } catch (const std::exception& e) {
        row.status = "fault";
        row.fault = e.what();
        log::info("seed " + std::to_string(seed) + " faulted: " + e.what());
    }
    row.contract_faults = contract_faults;
    if (contract_faults > 0 && row.fault.empty()) {
        row.status = "fault";
        row.fault = "learner played an unaware action";
    }
    if (have_policy && row.fault.empty())
        row.policy_value = evaluate_learned_policy(spec->mdp, final_policy, start, plan.oracle_horizon);
    if (oracle && row.fault.empty()) row.regret = *oracle - row.avg_reward;
    row.trace = trace.jsonl();
    return row;
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

}  // namespace

std::string Summary::csv() const {
    std::string out = "seed,steps,avg_reward,regret,discoveries,inconsistencies,rounds\n";
    for (const auto& r : rows) {
        out += std::to_string(r.seed) + ',' + std::to_string(r.steps) + ',' + format_number(r.avg_reward) + ',' +
               (r.regret ? format_number(*r.regret) : std::string()) + ',' + std::to_string(r.discoveries) + ',' +
               std::to_string(r.inconsistencies) + ',' + std::to_string(r.rounds) + '\n';
    }
    return out;
}

std::string Summary::json() const {
    using nlohmann::ordered_json;
    ordered_json j;
    j["scenario"] = plan.spec ? plan.spec->name : plan.scenario_path;
    j["algorithm"] = to_string(plan.algorithm);
    j["seeds"] = {{"first", plan.seeds.first}, {"last", plan.seeds.last}};
    ordered_json ov = ordered_json::object();
    if (plan.k0_override) ov["k0"] = *plan.k0_override;
    if (plan.k1_override) ov["k1"] = *plan.k1_override;
    if (plan.replay_override) ov["replay"] = *plan.replay_override;
    ov["max_steps"] = plan.max_steps;
    j["overrides"] = ov;
    j["include_explore_rewards"] = plan.include_explore_rewards;
    j["oracle_value"] = oracle_value ? ordered_json(*oracle_value) : ordered_json(nullptr);
    j["aggregate"] = {{"mean_avg_reward", mean_avg_reward}, {"q10", q10}, {"q50", q50}, {"q90", q90},
                      {"faults", faults}};
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json o;
        o["seed"] = r.seed;
        o["status"] = r.status;
        o["steps"] = r.steps;
        o["avg_reward"] = r.avg_reward;
        o["policy_value"] = r.policy_value;
        o["regret"] = r.regret ? ordered_json(*r.regret) : ordered_json(nullptr);
        o["discoveries"] = r.discoveries;
        o["discovery_steps"] = r.discovery_steps;
        o["inconsistencies"] = r.inconsistencies;
        o["inconsistency_kinds"] = r.inconsistency_kinds;
        o["rounds"] = r.rounds;
        o["convergence_round"] =
            r.convergence_round ? ordered_json(*r.convergence_round) : ordered_json(nullptr);
        if (!r.fault.empty()) o["fault"] = r.fault;
        arr.push_back(std::move(o));
    }
    j["rows"] = std::move(arr);
    return j.dump(2) + "\n";
}

Summary run_experiment(const ExperimentPlan& plan) {
    Summary summary;
    summary.plan = plan;
    auto spec = plan.spec ? plan.spec : std::make_shared<const MdpuSpec>(load_scenario(plan.scenario_path));
    summary.plan.spec = spec;
    {
        const auto report = validate_mdpu(*spec);
        if (!report.ok()) throw InvalidInput(report.to_string());
    }
    if (spec->aware_states.empty()) throw InvalidInput("scenario has no aware states");
    const StateIndex start = resolve_start(*spec, plan.start.empty() ? spec->aware_states.front() : plan.start);

    if (plan.oracle) summary.oracle_value = opt_oracle(spec->mdp, plan.oracle_horizon).value;

    const auto n = static_cast<std::size_t>(plan.seeds.count());
    summary.rows.resize(n);
    log::info("running " + std::to_string(n) + " seeds of " + to_string(plan.algorithm));
    parallel_for(n, plan.threads, [&](std::size_t i) {
        summary.rows[i] = run_seed(plan, spec, start, summary.oracle_value, plan.seeds.first + i);
    });

    std::vector<double> avgs;
    for (const auto& r : summary.rows) {
        if (!r.fault.empty()) {
            ++summary.faults;
            continue;
        }
        avgs.push_back(r.avg_reward);
    }
    if (!avgs.empty()) {
        CompensatedSum sum;
        for (double a : avgs) sum.add(a);
        summary.mean_avg_reward = sum.value() / static_cast<double>(avgs.size());
    }
    summary.q10 = quantile(avgs, 0.1);
    summary.q50 = quantile(avgs, 0.5);
    summary.q90 = quantile(avgs, 0.9);

    if (!plan.out_dir.empty()) {
        namespace fs = std::filesystem;
        const fs::path dir(plan.out_dir);
        fs::create_directories(dir);
        for (const auto& r : summary.rows) write_file(dir / ("trace_seed" + std::to_string(r.seed) + ".jsonl"), r.trace);
        write_file(dir / "summary.csv", summary.csv());
        write_file(dir / "summary.json", summary.json());
    }
    return summary;
}

// ---------------------------------------------------------------------------

MdpuSpec example1_spec() {
    MdpuSpec spec;
    spec.name = "example1";
    spec.mdp.states = {"s1"};
    spec.mdp.actions = {{"a1", "a2"}};
    spec.mdp.prob = {{{1.0}, {1.0}}};
    spec.mdp.reward = {{{1.0}, {2.0}}};
    spec.aware_states = {"s1"};
    spec.aware_actions = {{"s1", {"a1"}}};
    spec.discovery = DiscoveryFamily::power(2.0);
    spec.explore_found = {0.0};
    spec.explore_not_found = {0.0};
    spec.knowledge.N = 1;
    spec.knowledge.k = 2;
    spec.knowledge.rmax = 2.0;
    spec.knowledge.T = 1;
    return spec;
}

std::vector<DemoRow> demo_example1(std::uint64_t trials, std::uint64_t horizon, std::uint64_t seed,
                                   unsigned threads) {
    if (trials == 0) throw InvalidInput("trials must be at least 1");
    if (horizon == 0) throw InvalidInput("horizon must be at least 1");
    const auto spec = std::make_shared<const MdpuSpec>(example1_spec());

    // first[i]: explore play on which trial i discovered a2, 0 if never.
    std::vector<std::uint64_t> first(trials, 0);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t i) {
        Environment env(spec, 0, seed + i);
        for (std::uint64_t t = 1; t <= horizon; ++t)
            if (env.step(kExplore).discovered) {
                first[i] = t;
                break;
            }
    });

    // found_by[t]: trials that discovered within t plays.
    std::vector<std::uint64_t> found_by(horizon + 1, 0);
    for (auto f : first)
        if (f) ++found_by[f];
    for (std::uint64_t t = 1; t <= horizon; ++t) found_by[t] += found_by[t - 1];

    std::vector<std::uint64_t> grid;
    for (std::uint64_t decade = 1; decade <= horizon; decade *= 10) {
        for (std::uint64_t m : {1, 2, 5})
            if (decade * m <= horizon) grid.push_back(decade * m);
        if (decade > horizon / 10) break;
    }
    if (grid.empty() || grid.back() != horizon) grid.push_back(horizon);

    std::vector<DemoRow> rows;
    const double n = static_cast<double>(trials);
    for (auto t : grid) {
        DemoRow r;
        r.t = t;
        r.empirical = static_cast<double>(trials - found_by[t]) / n;
        r.closed_form = static_cast<double>(t + 2) / (2.0 * static_cast<double>(t + 1));
        r.sigma = std::sqrt(r.closed_form * (1.0 - r.closed_form) / n);
        rows.push_back(r);
    }
    return rows;
}

std::string demo_csv(const std::vector<DemoRow>& rows) {
    std::string out = "t,empirical,closed_form,sigma\n";
    for (const auto& r : rows)
        out += std::to_string(r.t) + ',' + format_number(r.empirical) + ',' + format_number(r.closed_form) + ',' +
               format_number(r.sigma) + '\n';
    return out;
}

}  // namespace mdpu
