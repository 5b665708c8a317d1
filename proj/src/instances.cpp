#include "adamdp/instances.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace adamdp {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

std::vector<Violation> validate_bundle(const InstanceBundle& bundle) {
    std::vector<Violation> out;
    if (bundle.transitions_required_external)
        out.push_back({"transitions REQUIRED-EXTERNAL: complete them from the cited source "
                       "before solving",
                       -1, -1, 0.0});
    auto inst = validate_instance(bundle.instance);
    out.insert(out.end(), inst.begin(), inst.end());
    for (const auto& [name, pi] : bundle.baselines) {
        auto vs = validate_policy(bundle.instance, pi);
        for (auto& v : vs) v.what = "baseline '" + name + "': " + v.what;
        out.insert(out.end(), vs.begin(), vs.end());
    }
    return out;
}

InstanceBundle toy_counterexample(double lambda, int epsilon) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must be in (0,1)");
    if (epsilon != -1 && epsilon != 1) throw std::invalid_argument("epsilon must be -1 or +1");

    const int S = 5, A = 2;
    InstanceBundle b;
    b.name = "toy";
    b.description = "five-state chain where partial adherence can hurt (epsilon=-1) or help "
                    "(epsilon=+1)";
    b.provenance = "built-in";
    b.state_names = {"1", "2", "3", "4", "5"};
    b.action_names = {"a0", "a1"};

    MdpInstance m(S, A, lambda);
    m.initial_dist = {1.0, 0.0, 0.0, 0.0, 0.0};
    // Successor of (state, action); action 0 is the lower-numbered choice.
    const int succ[S][A] = {{1, 2}, {3, 4}, {3, 4}, {3, 3}, {4, 4}};
    // Reward attached to leaving a state, independent of action and successor.
    const double leave_reward[S] = {0.0, 0.1, 0.0, 1.0, 1.0 + epsilon};
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            m.p(s, a, succ[s][a]) = 1.0;
            for (int t = 0; t < S; ++t) m.r(s, a, t) = leave_reward[s];
        }
    b.instance = std::move(m);

    b.baselines["base"] = StationaryPolicy::deterministic(S, A, {1, 1, 0, 0, 0});
    b.baselines["alg"] = StationaryPolicy::deterministic(S, A, {0, 0, 1, 0, 0});
    return b;
}

InstanceBundle machine_replacement_template() {
    const int S = 10, A = 2; // states 1..8, R1, R2; actions repair, wait
    InstanceBundle b;
    b.name = "machine-replacement";
    b.description = "machine condition chain with two repair states; rewards and discount are "
                    "fixed, transition probabilities must be supplied externally";
    b.provenance = "REQUIRED-EXTERNAL transitions";
    b.state_names = {"1", "2", "3", "4", "5", "6", "7", "8", "R1", "R2"};
    b.action_names = {"repair", "wait"};
    b.transitions_required_external = true;

    MdpInstance m(S, A, 0.99);
    m.initial_dist.assign(S, 0.0);
    m.initial_dist[0] = 1.0; // start in state 1
    double state_reward[S];
    for (int s = 0; s < 8; ++s) state_reward[s] = 20.0;
    state_reward[7] = 0.0;  // broken
    state_reward[8] = 18.0; // R1
    state_reward[9] = 10.0; // R2
    std::fill(m.transitions.begin(), m.transitions.end(), kNaN);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            for (int t = 0; t < S; ++t) m.r(s, a, t) = state_reward[s];
    b.instance = std::move(m);

    b.baselines["always_wait"] = StationaryPolicy::deterministic(S, A, std::vector<int>(S, 1));
    std::vector<int> repair_when_stuck(S, 1);
    repair_when_stuck[7] = 0; // repair in state 8
    repair_when_stuck[8] = 0; // repair in R1
    b.baselines["repair_in_8_R1"] = StationaryPolicy::deterministic(S, A, repair_when_stuck);
    return b;
}

InstanceBundle healthcare_template() {
    const int S = 6, A = 3; // severity 1..5 plus mortality state m
    InstanceBundle b;
    b.name = "healthcare";
    b.description = "patient severity chain with an absorbing mortality state; dosage rewards "
                    "and discount fixed, transition probabilities must be supplied externally";
    b.provenance = "REQUIRED-EXTERNAL transitions (mortality row prefilled, absorbing)";
    b.state_names = {"1", "2", "3", "4", "5", "m"};
    b.action_names = {"low", "medium", "high"};
    b.transitions_required_external = true;

    MdpInstance m(S, A, 0.99);
    m.initial_dist.assign(S, 0.0);
    m.initial_dist[0] = 1.0;
    const double action_reward[A] = {20.0, 15.0, 10.0};
    std::fill(m.transitions.begin(), m.transitions.end(), kNaN);
    for (int a = 0; a < A; ++a) {
        for (int t = 0; t < S; ++t) m.p(5, a, t) = t == 5 ? 1.0 : 0.0; // mortality absorbs
        for (int s = 0; s < S; ++s)
            for (int t = 0; t < S; ++t) m.r(s, a, t) = s == 5 ? 0.0 : action_reward[a];
    }
    b.instance = std::move(m);

    for (int a = 0; a < A; ++a) {
        std::string name = "always_" + b.action_names[a];
        b.baselines[name] = StationaryPolicy::deterministic(S, A, std::vector<int>(S, a));
    }
    return b;
}

namespace {

json num_or_null(double x) {
    if (std::isnan(x)) return nullptr;
    return x;
}

double num_from(const json& j, const std::string& where) {
    if (j.is_null()) return kNaN;
    if (!j.is_number()) throw std::runtime_error("expected number at " + where);
    return j.get<double>();
}

json matrix_to_json(const std::vector<double>& flat, int rows, int cols) {
    json out = json::array();
    for (int i = 0; i < rows; ++i) {
        json row = json::array();
        for (int j = 0; j < cols; ++j) row.push_back(num_or_null(flat[static_cast<size_t>(i) * cols + j]));
        out.push_back(row);
    }
    return out;
}

json tensor_to_json(const std::vector<double>& flat, int s, int a, int t) {
    json out = json::array();
    for (int i = 0; i < s; ++i) {
        json mid = json::array();
        for (int j = 0; j < a; ++j) {
            json row = json::array();
            for (int k = 0; k < t; ++k)
                row.push_back(num_or_null(flat[(static_cast<size_t>(i) * a + j) * t + k]));
            mid.push_back(row);
        }
        out.push_back(mid);
    }
    return out;
}

void tensor_from_json(const json& j, std::vector<double>& flat, int s, int a, int t,
                      const std::string& field) {
    if (!j.is_array() || static_cast<int>(j.size()) != s)
        throw std::runtime_error(field + ": expected " + std::to_string(s) + " outer entries");
    flat.assign(static_cast<size_t>(s) * a * t, 0.0);
    for (int i = 0; i < s; ++i) {
        const json& mid = j[i];
        if (!mid.is_array() || static_cast<int>(mid.size()) != a)
            throw std::runtime_error(field + "[" + std::to_string(i) + "]: expected " +
                                     std::to_string(a) + " entries");
        for (int jj = 0; jj < a; ++jj) {
            const json& row = mid[jj];
            if (!row.is_array() || static_cast<int>(row.size()) != t)
                throw std::runtime_error(field + "[" + std::to_string(i) + "][" +
                                         std::to_string(jj) + "]: expected " + std::to_string(t) +
                                         " entries");
            for (int k = 0; k < t; ++k)
                flat[(static_cast<size_t>(i) * a + jj) * t + k] =
                    num_from(row[k], field + "[" + std::to_string(i) + "][" + std::to_string(jj) +
                                         "][" + std::to_string(k) + "]");
        }
    }
}

void matrix_from_json(const json& j, std::vector<double>& flat, int rows, int cols,
                      const std::string& field) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw std::runtime_error(field + ": expected " + std::to_string(rows) + " rows");
    flat.assign(static_cast<size_t>(rows) * cols, 0.0);
    for (int i = 0; i < rows; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw std::runtime_error(field + "[" + std::to_string(i) + "]: expected " +
                                     std::to_string(cols) + " entries");
        for (int k = 0; k < cols; ++k)
            flat[static_cast<size_t>(i) * cols + k] =
                num_from(row[k], field + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
}

const char* const kKnownKeys[] = {"schema_version", "name",         "description",
                                  "provenance",     "n_states",     "n_actions",
                                  "state_names",    "action_names", "discount",
                                  "initial_dist",   "transitions",  "rewards",
                                  "baselines",      "baseline_ambiguity",
                                  "transitions_required_external"};

} // namespace

void save_bundle(const InstanceBundle& b, const std::string& path) {
    const MdpInstance& m = b.instance;
    json j;
    j["schema_version"] = "1";
    j["name"] = b.name;
    j["description"] = b.description;
    j["provenance"] = b.provenance;
    j["n_states"] = m.num_states;
    j["n_actions"] = m.num_actions;
    j["state_names"] = b.state_names;
    j["action_names"] = b.action_names;
    j["discount"] = m.discount;
    json p0 = json::array();
    for (double x : m.initial_dist) p0.push_back(num_or_null(x));
    j["initial_dist"] = p0;
    j["transitions"] = tensor_to_json(m.transitions, m.num_states, m.num_actions, m.num_states);
    j["rewards"] = tensor_to_json(m.rewards, m.num_states, m.num_actions, m.num_states);
    json bl = json::object();
    for (const auto& [name, pi] : b.baselines)
        bl[name] = matrix_to_json(pi.probs, pi.num_states, pi.num_actions);
    j["baselines"] = bl;
    if (b.transitions_required_external) j["transitions_required_external"] = true;
    if (b.ambiguity) {
        json amb = json::array();
        for (const auto& per_state : b.ambiguity->vertices) {
            json vs = json::array();
            for (const auto& vertex : per_state) {
                json row = json::array();
                for (double x : vertex) row.push_back(num_or_null(x));
                vs.push_back(row);
            }
            amb.push_back(vs);
        }
        j["baseline_ambiguity"] = amb;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(1) << "\n";
    if (!out) throw std::runtime_error("failed writing: " + path);
}

InstanceBundle load_bundle(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("parse error in " + path + ": " + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : kKnownKeys)
            if (it.key() == k) known = true;
        if (!known && warnings)
            warnings->push_back("unknown key '" + it.key() + "' ignored");
    }

    InstanceBundle b;
    b.name = j.value("name", std::string{});
    b.description = j.value("description", std::string{});
    b.provenance = j.value("provenance", std::string{});
    b.transitions_required_external = j.value("transitions_required_external", false);
    int S = j.at("n_states").get<int>();
    int A = j.at("n_actions").get<int>();
    if (S <= 0 || A <= 0) throw std::runtime_error("n_states/n_actions must be positive");
    MdpInstance m(S, A, j.at("discount").get<double>());
    if (j.contains("state_names")) b.state_names = j["state_names"].get<std::vector<std::string>>();
    if (j.contains("action_names"))
        b.action_names = j["action_names"].get<std::vector<std::string>>();
    const json& p0 = j.at("initial_dist");
    if (!p0.is_array() || static_cast<int>(p0.size()) != S)
        throw std::runtime_error("initial_dist: expected " + std::to_string(S) + " entries");
    for (int s = 0; s < S; ++s) m.initial_dist[s] = num_from(p0[s], "initial_dist");
    tensor_from_json(j.at("transitions"), m.transitions, S, A, S, "transitions");
    tensor_from_json(j.at("rewards"), m.rewards, S, A, S, "rewards");
    b.instance = std::move(m);

    if (j.contains("baselines"))
        for (auto it = j["baselines"].begin(); it != j["baselines"].end(); ++it) {
            StationaryPolicy pi(S, A);
            matrix_from_json(it.value(), pi.probs, S, A, "baselines." + it.key());
            auto vs = validate_policy(b.instance, pi);
            if (!vs.empty())
                throw std::runtime_error("baseline '" + it.key() + "' in " + path +
                                         " is not a valid policy: " + vs.front().what +
                                         (vs.front().state >= 0
                                              ? " (state " + std::to_string(vs.front().state) + ")"
                                              : ""));
            b.baselines[it.key()] = std::move(pi);
        }

    if (j.contains("baseline_ambiguity")) {
        const json& amb = j["baseline_ambiguity"];
        if (!amb.is_array() || static_cast<int>(amb.size()) != S)
            throw std::runtime_error("baseline_ambiguity: expected one vertex list per state");
        BaselineAmbiguity g;
        g.num_states = S;
        g.num_actions = A;
        g.vertices.resize(S);
        for (int s = 0; s < S; ++s) {
            if (!amb[s].is_array() || amb[s].empty())
                throw std::runtime_error("baseline_ambiguity[" + std::to_string(s) +
                                         "]: need at least one vertex");
            for (const json& row : amb[s]) {
                if (!row.is_array() || static_cast<int>(row.size()) != A)
                    throw std::runtime_error("baseline_ambiguity[" + std::to_string(s) +
                                             "]: vertex has wrong arity");
                std::vector<double> vertex(A);
                for (int a = 0; a < A; ++a)
                    vertex[a] = num_from(row[a], "baseline_ambiguity");
                g.vertices[s].push_back(std::move(vertex));
            }
        }
        b.ambiguity = std::move(g);
    }

    // Surface numeric invariant violations early, with locations. Templates
    // with unfilled transitions are allowed through; validate_bundle reports
    // them.
    if (!b.transitions_required_external) {
        auto vs = validate_instance(b.instance);
        if (!vs.empty()) {
            const Violation& v = vs.front();
            std::string loc;
            if (v.state >= 0) loc += " state " + std::to_string(v.state);
            if (v.action >= 0) loc += " action " + std::to_string(v.action);
            throw std::runtime_error("invalid instance in " + path + ": " + v.what + loc);
        }
    }
    return b;
}

} // namespace adamdp
