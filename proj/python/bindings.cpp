#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "mdpu/bounds.hpp"
#include "mdpu/environment.hpp"
#include "mdpu/experiment.hpp"
#include "mdpu/planning.hpp"
#include "mdpu/scenario.hpp"

namespace py = pybind11;
using namespace mdpu;

namespace {

/// Finite counts become ints; infinite or saturated ones become None.
py::object count_to_py(const ExtendedCount& c) {
    if (c.finite()) return py::int_(c.value);
    return py::none();
}

py::dict count_details(const ExtendedCount& c) {
    py::dict d;
    d["value"] = count_to_py(c);
    d["log_value"] = c.log_value;
    d["saturated"] = c.saturated;
    d["infinite"] = c.infinite;
    d["exact"] = c.exact;
    return d;
}

// pybind11 holders cannot be pointers to const.
using SpecPtr = std::shared_ptr<MdpuSpec>;

SpecPtr load(const std::string& path) { return std::make_shared<MdpuSpec>(load_scenario(path)); }

StateIndex state_of(const MdpuSpec& spec, const std::string& id) {
    const auto s = spec.mdp.state_index(id);
    if (s == MdpSpec::npos) throw InvalidInput("unknown state '" + id + "'");
    return s;
}

}  // namespace

PYBIND11_MODULE(_mdpu, m) {
    m.doc() = "MDPs with unawareness: simulator, learners and bound calculators";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
    py::register_exception<ContractFault>(m, "ContractFault", PyExc_RuntimeError);

    // Discovery families --------------------------------------------------
    py::class_<DiscoveryFamily>(m, "DiscoveryFamily")
        .def_static("constant", &DiscoveryFamily::constant, py::arg("c"))
        .def_static("power", &DiscoveryFamily::power, py::arg("alpha"))
        .def_static("harmonic_j", &DiscoveryFamily::harmonic_j)
        .def_static("log_harmonic", &DiscoveryFamily::log_harmonic, py::arg("m1") = 1.0)
        .def_static("table", [](std::vector<double> values) { return DiscoveryFamily::from_table({values}); },
                    py::arg("values"))
        .def("describe", &DiscoveryFamily::describe)
        .def("__repr__", [](const DiscoveryFamily& f) { return "DiscoveryFamily(" + f.describe() + ")"; });

    m.def("discovery_prob", &discovery_prob, py::arg("family"), py::arg("j"), py::arg("t"));
    m.def(
        "nondiscovery_product",
        [](const DiscoveryFamily& f, std::uint64_t j, std::uint64_t t) { return nondiscovery_product(f, j, t).value; },
        py::arg("family"), py::arg("j"), py::arg("t"));
    m.def("partial_sum", &partial_sum, py::arg("family"), py::arg("j"), py::arg("T"));
    m.def(
        "divergence_class",
        [](const DiscoveryFamily& f) { return std::string(to_string(divergence_class(f).kind)); },
        py::arg("family"));

    // Bounds --------------------------------------------------------------
    m.def(
        "k0", [](const DiscoveryFamily& f, double N, double delta) { return count_to_py(k0(f, N, delta)); },
        py::arg("family"), py::arg("N"), py::arg("delta"), "Explore-play threshold; None when unreachable.");
    m.def(
        "k0_details",
        [](const DiscoveryFamily& f, double N, double delta) { return count_details(k0(f, N, delta)); },
        py::arg("family"), py::arg("N"), py::arg("delta"));
    m.def(
        "k1_rmax",
        [](double S, double A, double T, double rmax, double eps, double delta) {
            return count_to_py(k1_rmax(S, A, T, rmax, eps, delta));
        },
        py::arg("S"), py::arg("A"), py::arg("T"), py::arg("rmax"), py::arg("epsilon"), py::arg("delta"));
    m.def(
        "k1_urmax",
        [](double N, double k, double T, double rmax, double eps, double delta) {
            return count_to_py(k1_urmax(N, k, T, rmax, eps, delta));
        },
        py::arg("N"), py::arg("k"), py::arg("T"), py::arg("rmax"), py::arg("epsilon"), py::arg("delta"));
    m.def(
        "k2_k3",
        [](double N, double k, double T, double rmax, double eps, double delta, std::uint64_t k0v) {
            const auto r = k2_k3(N, k, T, rmax, eps, delta, ExtendedCount::of(k0v));
            return py::make_tuple(count_to_py(r.k2), count_to_py(r.k3));
        },
        py::arg("N"), py::arg("k"), py::arg("T"), py::arg("rmax"), py::arg("epsilon"), py::arg("delta"),
        py::arg("k0"));
    m.def(
        "lower_bound_steps",
        [](const std::string& f, double m1, double m2, double c, double delta) {
            GrowthFunction g;
            g.m1 = m1;
            g.m2 = m2;
            if (f == "linear") g.kind = GrowthFunction::Kind::linear;
            else if (f == "log") g.kind = GrowthFunction::Kind::log;
            else if (f == "loglog") g.kind = GrowthFunction::Kind::loglog;
            else throw InvalidInput("unknown growth function '" + f + "'");
            return count_to_py(lower_bound_steps(g, c, delta));
        },
        py::arg("f"), py::arg("m1"), py::arg("m2"), py::arg("c"), py::arg("delta"));
    m.def(
        "impossibility_gap",
        [](const DiscoveryFamily& f, double r1, double r2) {
            const auto g = impossibility_gap(f, r1, r2);
            py::dict d;
            d["c1"] = g.c1;
            d["total_mass"] = g.total_mass;
            d["d"] = g.d;
            d["gap"] = g.gap;
            return d;
        },
        py::arg("family"), py::arg("r1"), py::arg("r2"));

    // Scenarios and planning -----------------------------------------------
    py::class_<MdpuSpec, SpecPtr>(m, "Scenario")
        .def_static("load", &load, py::arg("path"))
        .def_static("parse", [](const std::string& text) { return std::make_shared<MdpuSpec>(parse_scenario(text)); },
                    py::arg("text"))
        .def_readonly("name", &MdpuSpec::name)
        .def_property_readonly("states", [](const MdpuSpec& s) { return s.mdp.states; })
        .def_property_readonly("actions", [](const MdpuSpec& s) { return s.mdp.actions; })
        .def_readonly("aware_states", &MdpuSpec::aware_states)
        .def_readonly("aware_actions", &MdpuSpec::aware_actions)
        .def_property_readonly("discovery", [](const MdpuSpec& s) { return s.discovery; })
        .def("validate",
             [](const MdpuSpec& s) {
                 std::vector<std::string> out;
                 for (const auto& i : validate_mdpu(s).issues) out.push_back(i.location + ": " + i.message);
                 return out;
             })
        .def("to_json", [](const MdpuSpec& s) { return scenario_to_json(s); });

    m.def(
        "plan_finite_horizon",
        [](const MdpuSpec& spec, std::size_t T) {
            const auto plan = plan_finite_horizon(spec.mdp, T);
            py::dict d;
            d["values"] = plan.values;
            std::vector<std::vector<std::string>> names(plan.actions.size());
            for (std::size_t t = 0; t < plan.actions.size(); ++t)
                for (std::size_t s = 0; s < plan.actions[t].size(); ++s)
                    names[t].push_back(spec.mdp.actions[s][plan.actions[t][s]]);
            d["actions"] = names;
            return d;
        },
        py::arg("scenario"), py::arg("T"));
    m.def(
        "opt_oracle",
        [](const MdpuSpec& spec, std::size_t T) {
            const auto r = opt_oracle(spec.mdp, T);
            std::map<std::string, std::string> pi;
            for (std::size_t s = 0; s < r.policy.choice.size(); ++s)
                pi[spec.mdp.states[s]] = spec.mdp.actions[s][r.policy.choice[s]];
            return py::make_tuple(r.value, pi);
        },
        py::arg("scenario"), py::arg("T_eval"));

    // Environment ---------------------------------------------------------
    py::class_<Environment>(m, "Environment")
        .def(py::init([](SpecPtr spec, const std::string& start, std::uint64_t seed) {
                 return std::make_unique<Environment>(spec, resolve_start(*spec, start), seed);
             }),
             py::arg("scenario"), py::arg("start"), py::arg("seed"))
        .def_property_readonly("state", [](const Environment& e) { return e.state_name(e.current_state()); })
        .def("aware_actions",
             [](const Environment& e) {
                 std::vector<std::string> out;
                 const auto s = e.current_state();
                 for (auto a : e.aware_actions(s)) out.push_back(e.action_name(s, a));
                 return out;
             })
        .def(
            "step",
            [](Environment& e, const std::string& action) {
                const auto s = e.current_state();
                ActionIndex a = kExplore;
                if (action != kExploreName) {
                    a = e.spec().mdp.action_index(s, action);
                    if (a == MdpSpec::npos) throw InvalidInput("unknown action '" + action + "'");
                }
                const auto obs = e.step(a);
                py::dict d;
                d["next"] = e.state_name(obs.next_state);
                d["reward"] = obs.reward;
                d["explore"] = obs.was_explore;
                d["revealed"] = obs.discovered ? py::object(py::str(e.action_name(s, *obs.discovered)))
                                               : py::object(py::none());
                return d;
            },
            py::arg("action"))
        .def("failure_counter", [](const Environment& e, const std::string& s) { return e.failure_counter(state_of(e.spec(), s)); })
        .def("snapshot", [](const Environment& e) { return e.snapshot().to_json(); });
    m.attr("EXPLORE") = kExploreName;

    // Harness -------------------------------------------------------------
    m.def(
        "run_experiment",
        [](const std::string& scenario, const std::string& algo, const std::string& seeds,
           std::optional<std::uint64_t> k0_override, std::optional<std::uint64_t> k1_override,
           std::optional<std::uint64_t> replay, std::uint64_t max_steps, std::uint64_t rounds, bool oracle,
           bool include_explore_rewards, const std::string& out_dir) {
            ExperimentPlan plan;
            plan.scenario_path = scenario;
            plan.algorithm = parse_algorithm(algo);
            plan.seeds = SeedRange::parse(seeds);
            plan.k0_override = k0_override;
            plan.k1_override = k1_override;
            plan.replay_override = replay;
            plan.max_steps = max_steps;
            plan.rounds = rounds;
            plan.oracle = oracle;
            plan.include_explore_rewards = include_explore_rewards;
            plan.out_dir = out_dir;
            Summary s;
            {
                py::gil_scoped_release release;
                s = run_experiment(plan);
            }
            py::dict d;
            d["csv"] = s.csv();
            d["json"] = s.json();
            d["mean_avg_reward"] = s.mean_avg_reward;
            d["oracle_value"] = s.oracle_value ? py::object(py::float_(*s.oracle_value)) : py::object(py::none());
            d["faults"] = s.faults;
            return d;
        },
        py::arg("scenario"), py::arg("algo"), py::arg("seeds"), py::arg("k0_override") = py::none(),
        py::arg("k1_override") = py::none(), py::arg("replay") = py::none(), py::arg("max_steps") = 1'000'000,
        py::arg("rounds") = 4, py::arg("oracle") = false, py::arg("include_explore_rewards") = false,
        py::arg("out_dir") = "");
    m.def(
        "demo_example1",
        [](std::uint64_t trials, std::uint64_t horizon, std::uint64_t seed) {
            std::vector<DemoRow> rows;
            {
                py::gil_scoped_release release;
                rows = demo_example1(trials, horizon, seed);
            }
            py::list out;
            for (const auto& r : rows) out.append(py::make_tuple(r.t, r.empirical, r.closed_form, r.sigma));
            return out;
        },
        py::arg("trials"), py::arg("horizon"), py::arg("seed") = 0);
}
