#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "brute_force.hpp"
#include "doctest.h"
#include "json.hpp"
#include "mdpu/experiment.hpp"

using namespace mdpu;

namespace {

ExperimentPlan example1_plan() {
    ExperimentPlan plan;
    plan.scenario_path = mdpu::testing::scenario_path("example1");
    plan.algorithm = Algorithm::urmax_inner;
    plan.seeds = SeedRange::parse("1..10");
    plan.k1_override = 20;
    plan.k0_override = 30;
    plan.max_steps = 5'000;
    plan.keep_traces = true;
    return plan;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_SUITE("harness") {
    TEST_CASE("seed ranges") {
        const auto r = SeedRange::parse("3..7");
        CHECK(r.first == 3);
        CHECK(r.last == 7);
        CHECK(r.count() == 5);
        CHECK(SeedRange::parse("9").count() == 1);
        CHECK_THROWS_AS(SeedRange::parse("7..3"), InvalidInput);
        CHECK_THROWS_AS(SeedRange::parse("a..b"), InvalidInput);
        CHECK_THROWS_AS(SeedRange::parse(""), InvalidInput);
        CHECK(parse_algorithm("urmax-outer") == Algorithm::urmax_outer);
        CHECK_THROWS_AS(parse_algorithm("e3"), InvalidInput);
    }

    TEST_CASE("ten-seed run produces one row per seed in order") {
        const auto s = run_experiment(example1_plan());
        REQUIRE(s.rows.size() == 10);
        for (std::size_t i = 0; i < s.rows.size(); ++i) CHECK(s.rows[i].seed == i + 1);
        CHECK(s.faults == 0);
        const auto lines = split_lines(s.csv());
        REQUIRE(lines.size() == 11);
        CHECK(lines[0] == "seed,steps,avg_reward,regret,discoveries,inconsistencies,rounds");
        CHECK(s.csv().find('\r') == std::string::npos);
        for (const auto& r : s.rows) {
            CHECK(r.contract_faults == 0);
            CHECK_FALSE(r.regret.has_value());
            CHECK(r.discoveries <= 1);
            CHECK(r.discovery_steps.size() == r.discoveries);
            CHECK_FALSE(r.trace.empty());
        }
        const auto j = nlohmann::json::parse(s.json());
        CHECK(j["rows"].size() == 10);
        CHECK(j["algorithm"] == "urmax-inner");
        CHECK(j["oracle_value"].is_null());
    }

    TEST_CASE("aggregates are recomputable from the rows") {
        auto plan = example1_plan();
        plan.seeds = SeedRange::parse("0..19");
        const auto s = run_experiment(plan);
        std::vector<double> v;
        for (const auto& r : s.rows) v.push_back(r.avg_reward);
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        CHECK(s.mean_avg_reward == doctest::Approx(mean).epsilon(1e-12));
        std::sort(v.begin(), v.end());
        const double pos = 0.5 * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(pos);
        CHECK(s.q50 == doctest::Approx(v[lo] + (pos - static_cast<double>(lo)) * (v[lo + 1] - v[lo])));
        CHECK(s.q10 <= s.q50);
        CHECK(s.q50 <= s.q90);
    }

    TEST_CASE("thread count never changes the output") {
        auto plan = example1_plan();
        plan.threads = 1;
        const auto a = run_experiment(plan);
        plan.threads = 4;
        const auto b = run_experiment(plan);
        CHECK(a.csv() == b.csv());
        CHECK(a.json() == b.json());
        for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].trace == b.rows[i].trace);
    }

    TEST_CASE("files on disk") {
        namespace fs = std::filesystem;
        const auto dir = fs::temp_directory_path() / "mdpu_test_experiment";
        fs::remove_all(dir);
        auto plan = example1_plan();
        plan.seeds = SeedRange::parse("4..5");
        plan.oracle = true;
        plan.out_dir = dir.string();
        const auto s = run_experiment(plan);
        CHECK(slurp(dir / "summary.csv") == s.csv());
        CHECK(slurp(dir / "summary.json") == s.json());
        CHECK(slurp(dir / "trace_seed4.jsonl") == s.rows[0].trace);
        CHECK(fs::exists(dir / "trace_seed5.jsonl"));
        REQUIRE(s.oracle_value.has_value());
        CHECK(*s.oracle_value == doctest::Approx(2.0));
        for (const auto& r : s.rows) {
            REQUIRE(r.regret.has_value());
            CHECK(*r.regret == doctest::Approx(*s.oracle_value - r.avg_reward));
        }
        // Every trace line is a JSON object with an event.
        for (const auto& line : split_lines(s.rows[0].trace)) CHECK(nlohmann::json::parse(line).contains("event"));
        fs::remove_all(dir);
    }

    TEST_CASE("each algorithm runs on the shipped corpus") {
        for (const char* name : {"trivial", "rmax3", "hidden2"}) {
            for (auto algo : {Algorithm::rmax, Algorithm::urmax_inner, Algorithm::urmax_outer}) {
                ExperimentPlan plan;
                plan.scenario_path = mdpu::testing::scenario_path(name);
                plan.algorithm = algo;
                plan.seeds = SeedRange::parse("0..2");
                plan.k1_override = 10;
                plan.k0_override = 10;
                plan.replay_override = 100;
                plan.max_steps = 2'000;
                plan.rounds = 3;
                const auto s = run_experiment(plan);
                CHECK(s.faults == 0);
                CAPTURE(name);
                CAPTURE(to_string(algo));
                if (algo == Algorithm::urmax_outer)
                    for (const auto& r : s.rows) CHECK(r.rounds >= 1);
            }
        }
    }

    TEST_CASE("demo rows track the closed form") {
        const auto rows = demo_example1(20'000, 1'000, 5, 2);
        REQUIRE_FALSE(rows.empty());
        CHECK(rows.front().t == 1);
        CHECK(rows.back().t == 1'000);
        for (const auto& r : rows) {
            CHECK(r.closed_form == doctest::Approx((r.t + 2.0) / (2.0 * (r.t + 1.0))));
            CHECK(std::abs(r.empirical - r.closed_form) <= 4.0 * r.sigma + 1e-12);
        }
        const auto csv = demo_csv(rows);
        CHECK(csv.rfind("t,empirical,closed_form,sigma\n", 0) == 0);
        CHECK(demo_example1(2'000, 100, 5, 1) == demo_example1(2'000, 100, 5, 3));
    }

    TEST_CASE("number formatting") {
        CHECK(format_number(0.0) == "0");
        CHECK(format_number(-0.0) == "0");
        CHECK(format_number(0.7) == "0.7");
        CHECK(format_number(2.0) == "2");
        CHECK(format_number(0.1 + 0.2) == "0.30000000000000004");
    }
}
