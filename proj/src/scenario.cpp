#include "mdpu/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <tuple>
#include <sstream>

#include "json.hpp"

namespace mdpu {

using json = nlohmann::json;

std::vector<bool> MdpuSpec::aware_state_mask() const {
    std::vector<bool> mask(mdp.num_states(), false);
    for (const auto& id : aware_states) {
        const auto s = mdp.state_index(id);
        if (s != MdpSpec::npos) mask[s] = true;
    }
    return mask;
}

std::vector<std::vector<bool>> MdpuSpec::aware_action_mask() const {
    std::vector<std::vector<bool>> mask(mdp.num_states());
    const auto states = aware_state_mask();
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        mask[s].assign(mdp.num_actions(s), false);
        if (!states[s]) continue;
        auto it = aware_actions.find(mdp.states[s]);
        if (it == aware_actions.end()) continue;
        for (const auto& id : it->second) {
            const auto a = mdp.action_index(s, id);
            if (a != MdpSpec::npos) mask[s][a] = true;
        }
    }
    return mask;
}

std::size_t MdpuSpec::initial_action_count() const {
    std::set<std::string> ids;
    const auto mask = aware_action_mask();
    for (std::size_t s = 0; s < mdp.num_states(); ++s)
        for (std::size_t a = 0; a < mdp.num_actions(s); ++a)
            if (mask[s][a]) ids.insert(mdp.actions[s][a]);
    return ids.size();
}

std::size_t MdpuSpec::total_action_count() const {
    std::set<std::string> ids;
    for (const auto& acts : mdp.actions) ids.insert(acts.begin(), acts.end());
    return ids.size();
}

DmKnowledge DmKnowledge::initial(const MdpuSpec& spec) {
    return DmKnowledge{spec.aware_states, spec.aware_actions, spec.knowledge};
}

ValidationReport validate_mdpu(const MdpuSpec& spec) {
    ValidationReport report = validate_spec(spec.mdp);
    const auto& mdp = spec.mdp;

    if (spec.aware_states.empty()) report.add("aware_states", "initial awareness is empty");
    for (const auto& id : spec.aware_states)
        if (mdp.state_index(id) == MdpSpec::npos)
            report.add("aware_states", "aware state " + id + " is not a state of the MDP");

    for (const auto& [state, acts] : spec.aware_actions) {
        const auto s = mdp.state_index(state);
        if (s == MdpSpec::npos) {
            report.add("aware_actions." + state, "not a state of the MDP");
            continue;
        }
        if (std::find(spec.aware_states.begin(), spec.aware_states.end(), state) == spec.aware_states.end())
            report.add("aware_actions." + state, "awareness of actions at a state outside S0");
        if (s < mdp.actions.size())
            for (const auto& a : acts)
                if (mdp.action_index(s, a) == MdpSpec::npos)
                    report.add("aware_actions." + state, "action " + a + " is not in g_A(" + state + ")");
    }

    const auto n = mdp.num_states();
    if (spec.explore_found.size() != n || spec.explore_not_found.size() != n) {
        report.add("explore_found", "explore rewards must cover every state");
    } else {
        for (std::size_t s = 0; s < n; ++s) {
            const auto& id = mdp.states[s];
            if (!(spec.explore_not_found[s] >= 0.0) || !(spec.explore_found[s] >= 0.0))
                report.add("explore_found." + id, "negative explore reward");
            if (spec.explore_not_found[s] > spec.explore_found[s])
                report.add("explore_not_found." + id, "R-(s) exceeds R+(s)");
            if (spec.knowledge.rmax && !(spec.explore_found[s] < *spec.knowledge.rmax))
                report.add("explore_found." + id, "R+(s) must be below the declared Rmax");
        }
    }

    for (const auto& msg : validate_family(spec.discovery)) report.add("discovery", msg);

    const auto& k = spec.knowledge;
    if (k.N && *k.N == 0) report.add("knowledge.N", "must be positive");
    if (k.k && *k.k == 0) report.add("knowledge.k", "must be positive");
    if (k.T && *k.T == 0) report.add("knowledge.T", "must be positive");
    if (k.rmax && !(*k.rmax > 0.0)) report.add("knowledge.rmax", "must be positive");
    return report;
}

bool is_compatible(const MdpSpec& candidate, const DmKnowledge& knowledge) {
    for (const auto& id : knowledge.aware_states)
        if (candidate.state_index(id) == MdpSpec::npos) return false;
    for (const auto& [state, acts] : knowledge.aware_actions) {
        const auto s = candidate.state_index(state);
        if (s == MdpSpec::npos) return false;
        for (const auto& a : acts)
            if (candidate.action_index(s, a) == MdpSpec::npos) return false;
    }
    const auto& b = knowledge.bounds;
    if (b.N && candidate.num_states() > *b.N) return false;
    if (b.k) {
        std::set<std::string> ids;
        for (const auto& acts : candidate.actions) ids.insert(acts.begin(), acts.end());
        if (ids.size() > *b.k) return false;
    }
    if (b.rmax && candidate.max_reward() > *b.rmax) return false;
    return true;
}

MdpuSpec make_fully_aware(const MdpuSpec& spec) {
    MdpuSpec out = spec;
    out.aware_states = spec.mdp.states;
    out.aware_actions.clear();
    for (std::size_t s = 0; s < spec.mdp.num_states(); ++s)
        out.aware_actions[spec.mdp.states[s]] = spec.mdp.actions[s];
    return out;
}

// ---------------------------------------------------------------------------
// Scenario files

namespace {

class SchemaReader {
public:
    std::vector<std::string> issues;

    void fail(const std::string& path, const std::string& msg) { issues.push_back(path + ": " + msg); }

    void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            const bool known = std::any_of(allowed.begin(), allowed.end(),
                                           [&](const char* a) { return it.key() == a; });
            if (!known) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown field \"" + it.key() + "\"");
        }
    }

    const json* field(const json& obj, const std::string& path, const char* key, bool required = true) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(join(path, key), "missing required field");
            return nullptr;
        }
        return &*it;
    }

    std::optional<std::string> string(const json& v, const std::string& path) {
        if (!v.is_string()) {
            fail(path, "expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    std::optional<double> number(const json& v, const std::string& path) {
        if (!v.is_number()) {
            fail(path, "expected a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<std::uint64_t> positive_int(const json& v, const std::string& path) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            fail(path, "expected a nonnegative integer");
            return std::nullopt;
        }
        return v.get<std::uint64_t>();
    }

    std::vector<std::string> string_list(const json& v, const std::string& path) {
        std::vector<std::string> out;
        if (!v.is_array()) {
            fail(path, "expected an array of strings");
            return out;
        }
        for (std::size_t i = 0; i < v.size(); ++i)
            if (auto s = string(v[i], path + "[" + std::to_string(i) + "]")) out.push_back(*s);
        return out;
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
};

std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    // nlohmann reports the byte just past the offending token.
    if (col > 1) --col;
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

DiscoveryFamily read_discovery(SchemaReader& r, const json& v) {
    DiscoveryFamily fam;
    if (!v.is_object()) {
        r.fail("discovery", "expected an object");
        return fam;
    }
    const json* family = r.field(v, "discovery", "family");
    if (!family) return fam;
    const auto name = r.string(*family, "discovery.family");
    if (!name) return fam;

    auto param = [&](const char* key) {
        if (const json* p = r.field(v, "discovery", key))
            if (auto x = r.number(*p, std::string("discovery.") + key)) return *x;
        return 0.0;
    };

    if (*name == "constant") {
        r.reject_unknown(v, "discovery", {"family", "c"});
        fam = DiscoveryFamily::constant(param("c"));
    } else if (*name == "power") {
        r.reject_unknown(v, "discovery", {"family", "alpha"});
        fam = DiscoveryFamily::power(param("alpha"));
    } else if (*name == "harmonic_j") {
        r.reject_unknown(v, "discovery", {"family"});
        fam = DiscoveryFamily::harmonic_j();
    } else if (*name == "log_harmonic") {
        r.reject_unknown(v, "discovery", {"family", "m1"});
        fam = DiscoveryFamily::log_harmonic(param("m1"));
    } else if (*name == "table") {
        r.reject_unknown(v, "discovery", {"family", "values"});
        fam.kind = DiscoveryFamily::Kind::table;
        if (const json* vals = r.field(v, "discovery", "values")) {
            auto read_row = [&](const json& row, const std::string& path) {
                std::vector<double> out;
                for (std::size_t i = 0; i < row.size(); ++i)
                    if (auto x = r.number(row[i], path + "[" + std::to_string(i) + "]")) out.push_back(*x);
                return out;
            };
            if (!vals->is_array()) {
                r.fail("discovery.values", "expected an array");
            } else if (!vals->empty() && (*vals)[0].is_array()) {
                for (std::size_t i = 0; i < vals->size(); ++i) {
                    const auto path = "discovery.values[" + std::to_string(i) + "]";
                    if (!(*vals)[i].is_array())
                        r.fail(path, "expected an array");
                    else
                        fam.table.push_back(read_row((*vals)[i], path));
                }
            } else {
                fam.table.push_back(read_row(*vals, "discovery.values"));
            }
        }
    } else {
        r.fail("discovery.family", "unknown family \"" + *name + "\"");
    }
    return fam;
}

}  // namespace

MdpuSpec parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(ScenarioError::Kind::syntax,
                            "malformed JSON at " + line_column(text, e.byte));
    }

    SchemaReader r;
    MdpuSpec spec;
    if (!doc.is_object()) throw ScenarioError(ScenarioError::Kind::schema, "(root): expected an object");

    r.reject_unknown(doc, "",
                     {"name", "states", "actions", "aware_states", "aware_actions", "transitions", "explore_found",
                      "explore_not_found", "discovery", "knowledge"});

    if (const json* v = r.field(doc, "", "name"))
        if (auto s = r.string(*v, "name")) spec.name = *s;

    auto& mdp = spec.mdp;
    if (const json* v = r.field(doc, "", "states")) mdp.states = r.string_list(*v, "states");
    const auto n = mdp.num_states();
    mdp.actions.assign(n, {});

    if (const json* v = r.field(doc, "", "actions")) {
        if (!v->is_object()) {
            r.fail("actions", "expected an object keyed by state");
        } else {
            for (auto it = v->begin(); it != v->end(); ++it) {
                const auto s = mdp.state_index(it.key());
                if (s == MdpSpec::npos) {
                    r.fail("actions." + it.key(), "unknown state");
                    continue;
                }
                mdp.actions[s] = r.string_list(it.value(), "actions." + it.key());
            }
        }
    }

    mdp.prob.resize(n);
    mdp.reward.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        mdp.prob[s].assign(mdp.num_actions(s), std::vector<double>(n, 0.0));
        mdp.reward[s].assign(mdp.num_actions(s), std::vector<double>(n, 0.0));
    }
    std::vector<std::vector<bool>> seen(n);
    for (std::size_t s = 0; s < n; ++s) seen[s].assign(mdp.num_actions(s), false);

    if (const json* v = r.field(doc, "", "transitions")) {
        if (!v->is_array()) r.fail("transitions", "expected an array");
        std::set<std::tuple<std::size_t, std::size_t, std::size_t>> edges;
        for (std::size_t i = 0; v->is_array() && i < v->size(); ++i) {
            const auto path = "transitions[" + std::to_string(i) + "]";
            const json& e = (*v)[i];
            if (!e.is_object()) {
                r.fail(path, "expected an object");
                continue;
            }
            r.reject_unknown(e, path, {"from", "action", "to", "prob", "reward"});
            std::optional<std::string> from, action, to;
            std::optional<double> p, rew;
            if (const json* f = r.field(e, path, "from")) from = r.string(*f, path + ".from");
            if (const json* f = r.field(e, path, "action")) action = r.string(*f, path + ".action");
            if (const json* f = r.field(e, path, "to")) to = r.string(*f, path + ".to");
            if (const json* f = r.field(e, path, "prob")) p = r.number(*f, path + ".prob");
            if (const json* f = r.field(e, path, "reward")) rew = r.number(*f, path + ".reward");
            if (!from || !action || !to || !p || !rew) continue;

            const auto s = mdp.state_index(*from);
            const auto s2 = mdp.state_index(*to);
            if (s == MdpSpec::npos) {
                r.fail(path + ".from", "unknown state \"" + *from + "\"");
                continue;
            }
            if (s2 == MdpSpec::npos) {
                r.fail(path + ".to", "unknown state \"" + *to + "\"");
                continue;
            }
            const auto a = mdp.action_index(s, *action);
            if (a == MdpSpec::npos) {
                r.fail(path + ".action", "action \"" + *action + "\" is not available at " + *from);
                continue;
            }
            if (!edges.insert({s, a, s2}).second) {
                r.fail(path, "duplicate transition (" + *from + ", " + *action + ", " + *to + ")");
                continue;
            }
            if (*p < 0.0 || *p > 1.0) r.fail(path + ".prob", "probability outside [0, 1]");
            if (*rew < 0.0) r.fail(path + ".reward", "negative reward");
            mdp.prob[s][a][s2] = *p;
            mdp.reward[s][a][s2] = *rew;
            seen[s][a] = true;
        }
    }
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < mdp.num_actions(s); ++a) {
            const auto loc = "(" + mdp.states[s] + ", " + mdp.actions[s][a] + ")";
            if (!seen[s][a]) {
                r.fail("transitions", "no transitions for " + loc);
                continue;
            }
            double mass = 0.0;
            for (double x : mdp.prob[s][a]) mass += x;
            if (std::abs(mass - 1.0) > kProbabilityTolerance) {
                std::ostringstream msg;
                msg << "probabilities for " << loc << " sum to " << mass;
                r.fail("transitions", msg.str());
            }
        }
    }

    if (const json* v = r.field(doc, "", "aware_states")) spec.aware_states = r.string_list(*v, "aware_states");
    if (const json* v = r.field(doc, "", "aware_actions")) {
        if (!v->is_object())
            r.fail("aware_actions", "expected an object keyed by state");
        else
            for (auto it = v->begin(); it != v->end(); ++it)
                spec.aware_actions[it.key()] = r.string_list(it.value(), "aware_actions." + it.key());
    }

    auto read_state_map = [&](const char* key, std::vector<double>& out) {
        out.assign(n, 0.0);
        const json* v = r.field(doc, "", key);
        if (!v) return;
        if (!v->is_object()) {
            r.fail(key, "expected an object keyed by state");
            return;
        }
        for (auto it = v->begin(); it != v->end(); ++it) {
            const auto path = std::string(key) + "." + it.key();
            const auto s = mdp.state_index(it.key());
            if (s == MdpSpec::npos) {
                r.fail(path, "unknown state");
                continue;
            }
            if (auto x = r.number(it.value(), path)) out[s] = *x;
        }
    };
    read_state_map("explore_found", spec.explore_found);
    read_state_map("explore_not_found", spec.explore_not_found);

    if (const json* v = r.field(doc, "", "discovery")) spec.discovery = read_discovery(r, *v);

    if (const json* v = r.field(doc, "", "knowledge", false)) {
        if (!v->is_object()) {
            r.fail("knowledge", "expected an object");
        } else {
            r.reject_unknown(*v, "knowledge", {"N", "k", "rmax", "T"});
            auto& k = spec.knowledge;
            if (const json* f = r.field(*v, "knowledge", "N", false)) k.N = r.positive_int(*f, "knowledge.N");
            if (const json* f = r.field(*v, "knowledge", "k", false)) k.k = r.positive_int(*f, "knowledge.k");
            if (const json* f = r.field(*v, "knowledge", "T", false)) k.T = r.positive_int(*f, "knowledge.T");
            if (const json* f = r.field(*v, "knowledge", "rmax", false)) k.rmax = r.number(*f, "knowledge.rmax");
        }
    }

    if (r.issues.empty()) {
        // Schema is sound; run the semantic checks on the assembled model.
        for (const auto& issue : validate_mdpu(spec).issues) r.fail(issue.location, issue.message);
    }
    if (!r.issues.empty()) {
        std::string msg;
        for (std::size_t i = 0; i < r.issues.size(); ++i) msg += (i ? "; " : "") + r.issues[i];
        throw ScenarioError(ScenarioError::Kind::schema, msg);
    }
    return spec;
}

MdpuSpec load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(ScenarioError::Kind::io, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_to_json(const MdpuSpec& spec) {
    using ojson = nlohmann::ordered_json;
    const auto& mdp = spec.mdp;
    ojson doc;
    doc["name"] = spec.name;
    doc["states"] = mdp.states;
    ojson actions = ojson::object();
    for (std::size_t s = 0; s < mdp.num_states(); ++s) actions[mdp.states[s]] = mdp.actions[s];
    doc["actions"] = actions;
    doc["aware_states"] = spec.aware_states;
    ojson aware = ojson::object();
    for (const auto& [state, acts] : spec.aware_actions) aware[state] = acts;
    doc["aware_actions"] = aware;
    ojson transitions = ojson::array();
    for (std::size_t s = 0; s < mdp.num_states(); ++s)
        for (std::size_t a = 0; a < mdp.num_actions(s); ++a)
            for (std::size_t s2 = 0; s2 < mdp.num_states(); ++s2)
                if (mdp.prob[s][a][s2] > 0.0)
                    transitions.push_back({{"from", mdp.states[s]},
                                           {"action", mdp.actions[s][a]},
                                           {"to", mdp.states[s2]},
                                           {"prob", mdp.prob[s][a][s2]},
                                           {"reward", mdp.reward[s][a][s2]}});
    doc["transitions"] = transitions;
    ojson found = ojson::object(), not_found = ojson::object();
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        found[mdp.states[s]] = spec.explore_found[s];
        not_found[mdp.states[s]] = spec.explore_not_found[s];
    }
    doc["explore_found"] = found;
    doc["explore_not_found"] = not_found;

    ojson disc;
    disc["family"] = to_string(spec.discovery.kind);
    switch (spec.discovery.kind) {
        case DiscoveryFamily::Kind::constant: disc["c"] = spec.discovery.param; break;
        case DiscoveryFamily::Kind::power: disc["alpha"] = spec.discovery.param; break;
        case DiscoveryFamily::Kind::log_harmonic: disc["m1"] = spec.discovery.param; break;
        case DiscoveryFamily::Kind::table:
            if (spec.discovery.table.size() == 1)
                disc["values"] = spec.discovery.table.front();
            else
                disc["values"] = spec.discovery.table;
            break;
        case DiscoveryFamily::Kind::harmonic_j: break;
    }
    doc["discovery"] = disc;

    ojson know = ojson::object();
    const auto& k = spec.knowledge;
    if (k.N) know["N"] = *k.N;
    if (k.k) know["k"] = *k.k;
    if (k.rmax) know["rmax"] = *k.rmax;
    if (k.T) know["T"] = *k.T;
    doc["knowledge"] = know;
    return doc.dump(2) + "\n";
}

}  // namespace mdpu
