// Command-line front end: scenario validation, seed sweeps, the example1
// demo and the bound calculators. Every result is printed as JSON on stdout;
// failures print a single "error: ..." line on stderr.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mdpu/bounds.hpp"
#include "mdpu/experiment.hpp"
#include "mdpu/log.hpp"
#include "mdpu/scenario.hpp"

using nlohmann::ordered_json;
using namespace mdpu;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct FamilyArgs {
    std::string name = "constant";
    double c = 0.5;
    double alpha = 2.0;
    double scale = 1.0;  // log_harmonic m1
    std::vector<double> table;

    void add_to(CLI::App* app) {
        app->add_option("--family", name, "constant|power|harmonic_j|log_harmonic|table")->required();
        app->add_option("--c", c, "constant family probability");
        app->add_option("--alpha", alpha, "power family exponent");
        app->add_option("--scale", scale, "log_harmonic multiplier m1");
        app->add_option("--table", table, "comma-separated D(1,t) values for t = 1, 2, ...")->delimiter(',');
    }

    DiscoveryFamily build() const {
        DiscoveryFamily fam;
        if (name == "constant") fam = DiscoveryFamily::constant(c);
        else if (name == "power") fam = DiscoveryFamily::power(alpha);
        else if (name == "harmonic_j") fam = DiscoveryFamily::harmonic_j();
        else if (name == "log_harmonic") fam = DiscoveryFamily::log_harmonic(scale);
        else if (name == "table") fam = DiscoveryFamily::from_table({table});
        else throw InvalidInput("unknown family '" + name + "'");
        const auto problems = validate_family(fam);
        if (!problems.empty()) throw InvalidInput(problems.front());
        return fam;
    }
};

struct GrowthArgs {
    std::string kind = "log";
    double m1 = 1.0;
    double m2 = 0.0;
    double shift = 0.0;

    void add_to(CLI::App* app) {
        app->add_option("--f", kind, "linear|log|loglog|family")->required();
        app->add_option("--m1", m1, "growth multiplier");
        app->add_option("--m2", m2, "growth offset");
        app->add_option("--shift", shift, "argument shift inside the logarithm");
    }

    GrowthFunction build(const std::optional<DiscoveryFamily>& fam) const {
        GrowthFunction f;
        f.m1 = m1;
        f.m2 = m2;
        f.shift = shift;
        if (kind == "linear") f.kind = GrowthFunction::Kind::linear;
        else if (kind == "log") f.kind = GrowthFunction::Kind::log;
        else if (kind == "loglog") f.kind = GrowthFunction::Kind::loglog;
        else if (kind == "family") {
            if (!fam) throw InvalidInput("--f family requires --family");
            f.kind = GrowthFunction::Kind::family;
            f.family = *fam;
        } else {
            throw InvalidInput("unknown growth function '" + kind + "'");
        }
        return f;
    }
};

ordered_json count_json(const ExtendedCount& c) {
    ordered_json j;
    j["value"] = c.finite() ? ordered_json(c.value) : ordered_json(nullptr);
    j["display"] = c.to_string();
    j["log_value"] = std::isfinite(c.log_value) ? ordered_json(c.log_value) : ordered_json(nullptr);
    j["saturated"] = c.saturated;
    j["infinite"] = c.infinite;
    j["exact"] = c.exact;
    return j;
}

void print(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

void require_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learning in MDPs with unawareness: simulator, learners and bound calculators", "mdpu"};
    app.require_subcommand(1);

    // validate -------------------------------------------------------------
    std::string validate_file;
    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("file", validate_file, "scenario JSON")->required();

    // run ------------------------------------------------------------------
    ExperimentPlan plan;
    std::string algo = "urmax-inner", seeds = "0..9";
    std::optional<std::uint64_t> ov_k0, ov_k1, ov_replay;
    auto* run = app.add_subcommand("run", "Run a seed sweep of one learner");
    run->add_option("--scenario", plan.scenario_path, "scenario JSON")->required();
    run->add_option("--algo", algo, "rmax|urmax-inner|urmax-outer")->required();
    run->add_option("--seeds", seeds, "inclusive seed range A..B")->required();
    run->add_option("--override-k0", ov_k0, "explore-known threshold");
    run->add_option("--override-k1", ov_k1, "pair-known threshold");
    run->add_option("--override-replay", ov_replay, "exploitation steps (K2 + K3)");
    run->add_option("--max-steps", plan.max_steps, "learning step budget per run");
    run->add_option("--rounds", plan.rounds, "outer-loop rounds");
    run->add_option("--epsilon", plan.epsilon, "accuracy");
    run->add_option("--delta", plan.delta, "failure probability");
    run->add_option("--start", plan.start, "start state id (default: first aware state)");
    run->add_option("--threads", plan.threads, "worker threads (0: all cores)");
    run->add_flag("--include-explore-rewards", plan.include_explore_rewards, "count R+/R- in averages");
    run->add_flag("--oracle", plan.oracle, "compute the policy-enumeration optimum and regret");
    run->add_option("--out", plan.out_dir, "output directory")->required();

    // demo -----------------------------------------------------------------
    auto* demo = app.add_subcommand("demo", "Reproduce a worked example");
    demo->require_subcommand(1);
    std::uint64_t demo_trials = 100'000, demo_horizon = 10'000, demo_seed = 0;
    std::string demo_out;
    auto* ex1 = demo->add_subcommand("example1", "Non-discovery curve for D(j,t) = 1/(t+1)^2");
    ex1->add_option("--trials", demo_trials, "Monte Carlo trials");
    ex1->add_option("--horizon", demo_horizon, "largest explore count");
    ex1->add_option("--seed", demo_seed, "first seed");
    ex1->add_option("--out", demo_out, "output directory");

    // theory ---------------------------------------------------------------
    auto* theory = app.add_subcommand("theory", "Bound calculators");
    theory->require_subcommand(1);
    double N = 1, k = 1, T = 1, rmax = 1, epsilon = 1, delta = 0.1;
    double c = 0.5, r1 = 0, r2 = 1;
    std::string variant = "urmax";
    std::optional<std::uint64_t> k0_given;
    std::uint64_t verify_limit = 100'000;
    FamilyArgs fam_k0, fam_k2, fam_lb, fam_gap, fam_kb;
    GrowthArgs g_lb, g_kb;

    auto* t_k0 = theory->add_subcommand("k0", "Explore-play threshold K0");
    fam_k0.add_to(t_k0);
    t_k0->add_option("--N", N)->required();
    t_k0->add_option("--delta", delta)->required();

    auto* t_k1 = theory->add_subcommand("k1", "Visit threshold K1 (URMAX, or R-MAX with --variant rmax)");
    t_k1->add_option("--variant", variant, "urmax|rmax");
    t_k1->add_option("--N", N, "state bound (|S| for rmax)")->required();
    t_k1->add_option("--k", k, "action bound (|A| for rmax)")->required();
    t_k1->add_option("--T", T)->required();
    t_k1->add_option("--rmax", rmax)->required();
    t_k1->add_option("--epsilon", epsilon)->required();
    t_k1->add_option("--delta", delta)->required();

    auto* t_k2 = theory->add_subcommand("k2k3", "Exploitation lengths K2 and K3");
    t_k2->add_option("--N", N)->required();
    t_k2->add_option("--k", k)->required();
    t_k2->add_option("--T", T)->required();
    t_k2->add_option("--rmax", rmax)->required();
    t_k2->add_option("--epsilon", epsilon)->required();
    t_k2->add_option("--delta", delta)->required();
    t_k2->add_option("--k0", k0_given, "explicit K0 (otherwise computed from --family)");
    t_k2->add_option("--family", fam_k2.name);
    t_k2->add_option("--c", fam_k2.c);
    t_k2->add_option("--alpha", fam_k2.alpha);
    t_k2->add_option("--scale", fam_k2.scale);

    auto* t_lb = theory->add_subcommand("lower-bound", "Steps below which discovery fails with probability > delta");
    g_lb.add_to(t_lb);
    t_lb->add_option("--c", c, "bound on D(1,t)")->required();
    t_lb->add_option("--delta", delta)->required();
    t_lb->add_option("--family", fam_lb.name, "family for --f family");
    t_lb->add_option("--alpha", fam_lb.alpha);
    t_lb->add_option("--scale", fam_lb.scale);

    auto* t_gap = theory->add_subcommand("gap", "Impossibility gap for a convergent family");
    fam_gap.add_to(t_gap);
    t_gap->add_option("--r1", r1)->required();
    t_gap->add_option("--r2", r2)->required();

    auto* t_kb = theory->add_subcommand("k0-bound", "Check K0 <= f^{-1}(ln(4N/delta))");
    fam_kb.add_to(t_kb);
    g_kb.add_to(t_kb);
    t_kb->add_option("--N", N)->required();
    t_kb->add_option("--delta", delta)->required();
    t_kb->add_option("--verify-limit", verify_limit, "numeric lower-bound check range");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*validate) {
            const auto spec = load_scenario(validate_file);
            const auto report = validate_mdpu(spec);
            ordered_json j;
            j["file"] = validate_file;
            j["name"] = spec.name;
            j["valid"] = report.ok();
            j["states"] = spec.mdp.num_states();
            j["actions"] = spec.total_action_count();
            j["aware_states"] = spec.aware_states.size();
            j["aware_actions"] = spec.initial_action_count();
            j["discovery"] = spec.discovery.describe();
            ordered_json issues = ordered_json::array();
            for (const auto& i : report.issues) issues.push_back(i.location + ": " + i.message);
            j["issues"] = issues;
            print(j);
            if (!report.ok()) {
                std::cerr << "error: " << report.to_string() << '\n';
                return kExitUsage;
            }
            return kExitOk;
        }

        if (*run) {
            plan.algorithm = parse_algorithm(algo);
            plan.seeds = SeedRange::parse(seeds);
            plan.k0_override = ov_k0;
            plan.k1_override = ov_k1;
            plan.replay_override = ov_replay;
            require_delta(plan.delta);
            const auto summary = run_experiment(plan);
            ordered_json j;
            j["out"] = plan.out_dir;
            j["seeds"] = summary.rows.size();
            j["mean_avg_reward"] = summary.mean_avg_reward;
            j["q10"] = summary.q10;
            j["q50"] = summary.q50;
            j["q90"] = summary.q90;
            j["oracle_value"] = summary.oracle_value ? ordered_json(*summary.oracle_value) : ordered_json(nullptr);
            j["faults"] = summary.faults;
            print(j);
            if (summary.faults > 0) {
                for (const auto& r : summary.rows)
                    if (!r.fault.empty()) {
                        std::cerr << "error: seed " << r.seed << ": " << r.fault << '\n';
                        break;
                    }
                return kExitRuntime;
            }
            return kExitOk;
        }

        if (*ex1) {
            const auto rows = demo_example1(demo_trials, demo_horizon, demo_seed);
            if (!demo_out.empty()) {
                std::filesystem::create_directories(demo_out);
                std::ofstream out(std::filesystem::path(demo_out) / "demo_example1.csv", std::ios::binary);
                if (!out) throw std::runtime_error("cannot write demo_example1.csv");
                out << demo_csv(rows);
            }
            ordered_json arr = ordered_json::array();
            for (const auto& r : rows)
                arr.push_back({{"t", r.t}, {"empirical", r.empirical}, {"closed_form", r.closed_form},
                               {"sigma", r.sigma}});
            print({{"trials", demo_trials}, {"horizon", demo_horizon}, {"rows", arr}});
            return kExitOk;
        }

        if (*t_k0) {
            require_delta(delta);
            const auto fam = fam_k0.build();
            const auto v = k0(fam, N, delta);
            ordered_json j;
            j["family"] = fam.describe();
            j["N"] = N;
            j["delta"] = delta;
            j["threshold"] = std::log(4.0 * N / delta);
            j["k0"] = count_json(v);
            if (v.finite() && v.exact && v.value <= 10'000'000) {
                j["partial_sum_at_k0"] = partial_sum(fam, 1, v.value);
                j["partial_sum_before"] = partial_sum(fam, 1, v.value - 1);
            }
            print(j);
            return kExitOk;
        }

        if (*t_k1) {
            require_delta(delta);
            ExtendedCount v;
            if (variant == "urmax") v = k1_urmax(N, k, T, rmax, epsilon, delta);
            else if (variant == "rmax") v = k1_rmax(N, k, T, rmax, epsilon, delta);
            else throw InvalidInput("unknown variant '" + variant + "'");
            print({{"variant", variant}, {"N", N}, {"k", k}, {"T", T}, {"rmax", rmax}, {"epsilon", epsilon},
                   {"delta", delta}, {"k1", count_json(v)}});
            return kExitOk;
        }

        if (*t_k2) {
            require_delta(delta);
            ExtendedCount k0v;
            if (k0_given) {
                k0v = ExtendedCount::of(*k0_given);
            } else {
                if (t_k2->count("--family") == 0) throw InvalidInput("k2k3 needs --k0 or --family");
                k0v = k0(fam_k2.build(), N, delta);
            }
            const auto r = k2_k3(N, k, T, rmax, epsilon, delta, k0v);
            print({{"N", N}, {"k", k}, {"T", T}, {"rmax", rmax}, {"epsilon", epsilon}, {"delta", delta},
                   {"k0", count_json(k0v)}, {"k2", count_json(r.k2)}, {"k3", count_json(r.k3)}});
            return kExitOk;
        }

        if (*t_lb) {
            require_delta(delta);
            std::optional<DiscoveryFamily> fam;
            if (t_lb->count("--family")) fam = fam_lb.build();
            const auto f = g_lb.build(fam);
            const auto steps = lower_bound_steps(f, c, delta);
            ordered_json j;
            j["f"] = f.describe();
            j["c"] = c;
            j["delta"] = delta;
            j["target"] = lower_bound_target(c, delta);
            if (f.kind != GrowthFunction::Kind::family) j["closed_form_inverse"] = f.inverse(j["target"].get<double>());
            j["steps"] = count_json(steps);
            print(j);
            return kExitOk;
        }

        if (*t_gap) {
            const auto g = impossibility_gap(fam_gap.build(), r1, r2);
            print({{"family", fam_gap.build().describe()}, {"r1", r1}, {"r2", r2}, {"c1", g.c1},
                   {"total_mass", g.total_mass}, {"d", g.d}, {"gap", g.gap}});
            return kExitOk;
        }

        if (*t_kb) {
            require_delta(delta);
            const auto fam = fam_kb.build();
            const auto f = g_kb.build(fam);
            const auto r = k0_upper_bound_check(fam, f, N, delta, verify_limit);
            print({{"family", fam.describe()}, {"f", f.describe()}, {"N", N}, {"delta", delta},
                   {"k0", count_json(r.k0)}, {"f_inverse", count_json(r.f_inverse)},
                   {"lower_bound_verified", r.lower_bound_verified}, {"verified_up_to", r.verified_up_to},
                   {"holds", r.holds}});
            return r.holds ? kExitOk : kExitUsage;
        }
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
