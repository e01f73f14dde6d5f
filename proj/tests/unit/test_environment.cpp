#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "brute_force.hpp"
#include "doctest.h"
#include "mdpu/environment.hpp"
#include "mdpu/trace.hpp"

using namespace mdpu;
using mdpu::testing::load_shared;

namespace {

/// One state, one known action and `hidden` further actions behind `fam`.
std::shared_ptr<const MdpuSpec> hidden_actions(std::size_t hidden, const DiscoveryFamily& fam) {
    MdpuSpec spec;
    spec.name = "hidden";
    spec.mdp.states = {"s"};
    spec.mdp.actions = {{"known"}};
    for (std::size_t i = 0; i < hidden; ++i) spec.mdp.actions[0].push_back("h" + std::to_string(i));
    for (std::size_t i = 0; i <= hidden; ++i) {
        spec.mdp.prob.resize(1);
        spec.mdp.reward.resize(1);
        spec.mdp.prob[0].push_back({1.0});
        spec.mdp.reward[0].push_back({0.5});
    }
    spec.aware_states = {"s"};
    spec.aware_actions = {{"s", {"known"}}};
    spec.discovery = fam;
    spec.explore_found = {1.0};
    spec.explore_not_found = {0.25};
    return std::make_shared<const MdpuSpec>(spec);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("env-sim") {
    TEST_CASE("construction") {
        auto ex1 = load_shared("example1");
        Environment env(ex1, 0, 1);
        CHECK(env.undiscovered(0) == std::vector<ActionIndex>{1});
        CHECK(env.aware_actions(0) == std::vector<ActionIndex>{0});

        auto full = std::make_shared<const MdpuSpec>(make_fully_aware(*ex1));
        Environment envf(full, 0, 1);
        CHECK(envf.undiscovered(0).empty());

        Environment a(ex1, 0, 42), b(ex1, 0, 42);
        CHECK(a.snapshot() == b.snapshot());

        auto unseen = load_shared("unseen3");
        CHECK_THROWS_AS(Environment(unseen, 2, 0), InvalidInput);  // s3 is not in S0
        CHECK_THROWS_AS(resolve_start(*unseen, "s3"), InvalidInput);
        Environment u(unseen, 0, 0);
        CHECK(u.undiscovered(2).size() == 2);  // states outside S0 start fully hidden
        CHECK(u.aware_actions(2).empty());
    }

    TEST_CASE("explore with nothing hidden") {
        auto spec = load_shared("chain2");
        Environment env(spec, 0, 3);
        for (std::uint64_t i = 1; i <= 5; ++i) {
            const auto obs = env.step(kExplore);
            CHECK(obs.was_explore);
            CHECK(obs.next_state == 0);
            CHECK_FALSE(obs.discovered);
            CHECK(obs.reward == spec->explore_not_found[0]);
            CHECK(env.failure_counter(0) == i);
        }
    }

    TEST_CASE("known actions follow the transition table") {
        auto spec = load_shared("chain2");
        Environment env(spec, 0, 3);
        auto obs = env.step(1);
        CHECK(obs.next_state == 1);
        CHECK(obs.reward == 0.0);
        CHECK_FALSE(obs.was_explore);
        obs = env.step(0);
        CHECK(obs.next_state == 1);
        CHECK(obs.reward == 2.0);
    }

    TEST_CASE("playing a hidden action is a contract fault") {
        Environment env(load_shared("example1"), 0, 0);
        CHECK_THROWS_AS(env.step(1), ContractFault);
        CHECK(env.contract_faults() == 1);
        CHECK(env.steps() == 0);
    }

    TEST_CASE("discovery resets the failure counter") {
        Environment env(hidden_actions(2, DiscoveryFamily::constant(0.3)), 0, 11);
        std::uint64_t discoveries = 0;
        for (int i = 0; i < 200 && discoveries < 2; ++i) {
            const auto before = env.failure_counter(0);
            const auto obs = env.step(kExplore);
            if (obs.discovered) {
                ++discoveries;
                CHECK(obs.reward == 1.0);
                CHECK(env.failure_counter(0) == 0);
                CHECK(env.is_aware(0, *obs.discovered));
            } else {
                CHECK(obs.reward == 0.25);
                CHECK(env.failure_counter(0) == before + 1);
            }
        }
        CHECK(discoveries == 2);
        CHECK(env.undiscovered(0).empty());
    }

    TEST_CASE("snapshots round-trip and are byte-stable") {
        auto spec = load_shared("hidden2");
        Environment env(spec, 0, 7);
        const auto initial = env.snapshot();
        Environment fresh(spec, 0, 7);
        CHECK(initial == fresh.snapshot());

        env.step(kExplore);
        env.step(kExplore);
        env.step(1);
        for (int i = 0; i < 20; ++i)
            if (env.step(kExplore).discovered) break;
        env.step(1);
        const auto text = env.snapshot().to_json();
        CHECK(text + "\n" == read_file(std::string(MDPU_TEST_DATA_DIR) + "/env_snapshot_hidden2_seed7.json"));
        CHECK(EnvSnapshot::from_json(text) == env.snapshot());

        Environment restored(spec, EnvSnapshot::from_json(text));
        for (ActionIndex a : {kExplore, ActionIndex{0}, kExplore, ActionIndex{1}, ActionIndex{0}, kExplore}) {
            if (a != kExplore && !env.is_aware(env.current_state(), a)) a = kExplore;
            CHECK(env.step(a) == restored.step(a));
        }
        CHECK(env.snapshot() == restored.snapshot());
        CHECK_THROWS(EnvSnapshot::from_json("{\"seed\": 1}"));
    }

    TEST_CASE("identical inputs give identical observation streams") {
        auto spec = load_shared("unseen3");
        Environment a(spec, 0, 99), b(spec, 0, 99);
        TraceLog ta, tb;
        for (std::uint64_t i = 0; i < 500; ++i) {
            const auto s = a.current_state();
            const auto aware = a.aware_actions(s);
            const ActionIndex act = (i % 3 == 0 || aware.empty()) ? kExplore : aware[i % aware.size()];
            const auto oa = a.step(act);
            const auto ob = b.step(act);
            REQUIRE(oa == ob);
            ta.step(i, a, s, act, oa);
            tb.step(i, b, s, act, ob);
        }
        CHECK(ta.jsonl() == tb.jsonl());
    }

    TEST_CASE("trace step records") {
        auto spec = load_shared("example1");
        Environment env(spec, 0, 0);
        TraceLog trace;
        for (std::uint64_t i = 0; i < 50; ++i) {
            const auto obs = env.step(kExplore);
            trace.step(i, env, 0, kExplore, obs);
            if (obs.discovered) break;
        }
        trace.step(99, env, 0, 0, env.step(0));
        const auto& lines = trace.lines();
        CHECK(lines.back() == R"({"step":99,"state":"s1","action":"a1","next":"s1","reward":1.0,"event":"move"})");
        CHECK(lines.front().find(R"("action":"__explore__")") != std::string::npos);
        CHECK(trace.count("move") == 1);
        if (trace.count("discovery") == 1)
            CHECK(lines[lines.size() - 2].find(R"("revealed":"a2")") != std::string::npos);
        TraceLog off(false);
        off.step(0, env, 0, 0, env.step(0));
        CHECK(off.lines().empty());
    }

    TEST_CASE("transition frequencies converge") {
        auto spec = load_shared("unseen3");  // (s1, b) splits 0.5 / 0.5 between s3 and s2
        const std::uint64_t K = 100'000;
        std::uint64_t to_s2 = 0;
        Environment env(spec, 0, 5);
        for (std::uint64_t i = 0; i < K; ++i) {
            auto snap = env.snapshot();
            snap.current_state = 0;
            env = Environment(spec, snap);
            if (env.step(1).next_state == 1) ++to_s2;
        }
        const double freq = static_cast<double>(to_s2) / static_cast<double>(K);
        const double tol = 4.0 * std::sqrt(std::log(static_cast<double>(K)) / static_cast<double>(K));
        CHECK(std::abs(freq - 0.5) < tol);
    }

    TEST_CASE("empirical non-discovery matches the product") {
        const std::uint64_t trials = 20'000;
        struct Case {
            DiscoveryFamily fam;
            std::size_t hidden;
            std::uint64_t t;
        };
        for (const auto& c : {Case{DiscoveryFamily::power(2.0), 1, 10}, Case{DiscoveryFamily::constant(0.5), 2, 3},
                              Case{DiscoveryFamily::harmonic_j(), 3, 6}}) {
            auto spec = hidden_actions(c.hidden, c.fam);
            std::uint64_t none = 0;
            for (std::uint64_t seed = 0; seed < trials; ++seed) {
                Environment env(spec, 0, seed);
                bool found = false;
                for (std::uint64_t t = 0; t < c.t && !found; ++t) found = env.step(kExplore).discovered.has_value();
                if (!found) ++none;
            }
            const double p = nondiscovery_product(c.fam, c.hidden, c.t).value;
            const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
            CAPTURE(c.fam.describe());
            CHECK(std::abs(static_cast<double>(none) / static_cast<double>(trials) - p) <= 3.0 * sigma);
        }
    }

    TEST_CASE("revealed action is uniform") {
        auto spec = hidden_actions(3, DiscoveryFamily::constant(1.0));
        const std::uint64_t seeds = 10'000;
        std::array<std::uint64_t, 4> first{};
        for (std::uint64_t seed = 0; seed < seeds; ++seed) {
            Environment env(spec, 0, seed);
            const auto obs = env.step(kExplore);
            REQUIRE(obs.discovered);
            ++first[*obs.discovered];
        }
        const double p = 1.0 / 3.0;
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(seeds));
        for (std::size_t a = 1; a <= 3; ++a)
            CHECK(std::abs(static_cast<double>(first[a]) / static_cast<double>(seeds) - p) <= 3.0 * sigma);
    }
}
