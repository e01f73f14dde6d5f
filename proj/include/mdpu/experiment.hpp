#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mdpu/scenario.hpp"

namespace mdpu {

enum class Algorithm { rmax, urmax_inner, urmax_outer };

const char* to_string(Algorithm algo);
Algorithm parse_algorithm(const std::string& name);

/// Inclusive seed range "A..B" (or a single seed "A").
struct SeedRange {
    std::uint64_t first = 0;
    std::uint64_t last = 0;
    std::uint64_t count() const { return last - first + 1; }
    static SeedRange parse(const std::string& text);
};

struct ExperimentPlan {
    std::string scenario_path;
    /// Used instead of loading scenario_path when set.
    std::shared_ptr<const MdpuSpec> spec;
    Algorithm algorithm = Algorithm::urmax_inner;
    SeedRange seeds;
    std::optional<std::uint64_t> k0_override;
    std::optional<std::uint64_t> k1_override;
    std::optional<std::uint64_t> replay_override;
    std::uint64_t max_steps = 1'000'000;  // learning budget per run; also caps replay
    std::uint64_t rounds = 4;             // outer-loop rounds
    double epsilon = 1.0;
    double delta = 0.1;
    bool include_explore_rewards = false;
    bool oracle = false;
    std::size_t oracle_horizon = 1000;
    std::string start;       // start state id; first aware state when empty
    std::string out_dir;     // no files written when empty
    bool keep_traces = false; // record traces in memory even without out_dir
    unsigned threads = 0;    // 0 picks the hardware concurrency
};

struct SeedRow {
    std::uint64_t seed = 0;
    std::string status;  // final learner status, or "fault"
    std::uint64_t steps = 0;
    double avg_reward = 0.0;   // exploitation average of the final policy
    double policy_value = 0.0; // exact long-horizon average of the final policy
    std::optional<double> regret;
    std::uint64_t discoveries = 0;
    std::vector<std::uint64_t> discovery_steps;
    std::uint64_t inconsistencies = 0;
    std::map<std::string, std::uint64_t> inconsistency_kinds;
    std::uint64_t rounds = 0;
    std::optional<std::uint64_t> convergence_round;
    std::uint64_t contract_faults = 0;
    std::string fault;
    std::string trace;  // JSONL
};

struct Summary {
    ExperimentPlan plan;
    std::vector<SeedRow> rows;  // ascending seed order
    std::optional<double> oracle_value;
    double mean_avg_reward = 0.0;
    double q10 = 0.0, q50 = 0.0, q90 = 0.0;
    std::uint64_t faults = 0;

    std::string csv() const;
    std::string json() const;
};

/// Runs every seed independently (in parallel) and aggregates in ascending
/// seed order. Writes trace_seed<N>.jsonl, summary.csv and summary.json to
/// plan.out_dir when it is set.
Summary run_experiment(const ExperimentPlan& plan);

struct DemoRow {
    std::uint64_t t = 0;
    double empirical = 0.0;    // fraction of trials with no discovery after t explore plays
    double closed_form = 0.0;  // (t + 2) / (2 (t + 1))
    double sigma = 0.0;        // binomial standard error at the closed form

    bool operator==(const DemoRow&) const = default;
};

/// The single-state two-action scenario with a hidden better action and
/// D(j, t) = 1 / (t + 1)^2.
MdpuSpec example1_spec();

/// Explore-only Monte Carlo on example1_spec() over a log-spaced t grid up
/// to `horizon`. Trial i uses seed `seed + i`.
std::vector<DemoRow> demo_example1(std::uint64_t trials, std::uint64_t horizon, std::uint64_t seed = 0,
                                   unsigned threads = 0);

std::string demo_csv(const std::vector<DemoRow>& rows);

/// Deterministic number formatting shared by the CSV writers.
std::string format_number(double x);

}  // namespace mdpu
