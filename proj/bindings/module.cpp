#include "adamdp/adherence.hpp"
#include "adamdp/adversarial.hpp"
#include "adamdp/analysis.hpp"
#include "adamdp/constrained.hpp"
#include "adamdp/instances.hpp"
#include "adamdp/robust.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

namespace py = pybind11;
using namespace adamdp;

namespace {

// list-of-lists(-of-lists) helpers so the module feels native without a numpy
// dependency

std::vector<double> flatten3(const std::vector<std::vector<std::vector<double>>>& t, int S,
                             int A, const char* what) {
    if (static_cast<int>(t.size()) != S) throw py::value_error(std::string(what) + ": bad shape");
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(S) * A * S);
    for (const auto& mid : t) {
        if (static_cast<int>(mid.size()) != A)
            throw py::value_error(std::string(what) + ": bad shape");
        for (const auto& row : mid) {
            if (static_cast<int>(row.size()) != S)
                throw py::value_error(std::string(what) + ": bad shape");
            flat.insert(flat.end(), row.begin(), row.end());
        }
    }
    return flat;
}

std::vector<std::vector<double>> policy_rows(const StationaryPolicy& pi) {
    std::vector<std::vector<double>> rows(pi.num_states, std::vector<double>(pi.num_actions));
    for (int s = 0; s < pi.num_states; ++s)
        for (int a = 0; a < pi.num_actions; ++a) rows[s][a] = pi.prob(s, a);
    return rows;
}

StationaryPolicy policy_from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw py::value_error("policy needs at least one row");
    StationaryPolicy pi(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int s = 0; s < pi.num_states; ++s) {
        if (static_cast<int>(rows[s].size()) != pi.num_actions)
            throw py::value_error("ragged policy rows");
        for (int a = 0; a < pi.num_actions; ++a) pi.prob(s, a) = rows[s][a];
    }
    return pi;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "adherence-aware MDP solvers";

    py::class_<MdpInstance>(m, "MdpInstance")
        .def(py::init([](int S, int A,
                         const std::vector<std::vector<std::vector<double>>>& transitions,
                         const std::vector<std::vector<std::vector<double>>>& rewards,
                         const std::vector<double>& initial_dist, double discount) {
                 MdpInstance inst(S, A, discount);
                 inst.transitions = flatten3(transitions, S, A, "transitions");
                 inst.rewards = flatten3(rewards, S, A, "rewards");
                 if (static_cast<int>(initial_dist.size()) != S)
                     throw py::value_error("initial_dist: bad length");
                 inst.initial_dist = initial_dist;
                 return inst;
             }),
             py::arg("n_states"), py::arg("n_actions"), py::arg("transitions"),
             py::arg("rewards"), py::arg("initial_dist"), py::arg("discount"))
        .def_readonly("n_states", &MdpInstance::num_states)
        .def_readonly("n_actions", &MdpInstance::num_actions)
        .def_readonly("discount", &MdpInstance::discount)
        .def_readonly("initial_dist", &MdpInstance::initial_dist)
        .def("p", [](const MdpInstance& i, int s, int a, int t) { return i.p(s, a, t); })
        .def("r", [](const MdpInstance& i, int s, int a, int t) { return i.r(s, a, t); });

    py::class_<StationaryPolicy>(m, "StationaryPolicy")
        .def(py::init(&policy_from_rows), py::arg("rows"))
        .def_static("deterministic", &StationaryPolicy::deterministic, py::arg("n_states"),
                    py::arg("n_actions"), py::arg("actions"))
        .def_readonly("n_states", &StationaryPolicy::num_states)
        .def_readonly("n_actions", &StationaryPolicy::num_actions)
        .def("rows", &policy_rows)
        .def("is_deterministic", &StationaryPolicy::is_deterministic, py::arg("tol") = 1e-12)
        .def("action_at", &StationaryPolicy::action_at)
        .def("__eq__", [](const StationaryPolicy& a, const StationaryPolicy& b) {
            return a.num_states == b.num_states && a.num_actions == b.num_actions &&
                   a.probs == b.probs;
        });

    py::class_<AdherenceSpec>(m, "AdherenceSpec")
        .def_static("scalar", &AdherenceSpec::scalar, py::arg("theta"))
        .def_static("per_state", &AdherenceSpec::per_state, py::arg("theta_s"))
        .def_static(
            "per_state_action",
            [](const std::vector<std::vector<double>>& levels) {
                if (levels.empty()) throw py::value_error("levels must be non-empty");
                std::vector<double> flat;
                for (const auto& row : levels) flat.insert(flat.end(), row.begin(), row.end());
                return AdherenceSpec::per_state_action(flat, static_cast<int>(levels.size()),
                                                       static_cast<int>(levels[0].size()));
            },
            py::arg("theta_sa"));

    py::class_<Violation>(m, "Violation")
        .def_readonly("what", &Violation::what)
        .def_readonly("state", &Violation::state)
        .def_readonly("action", &Violation::action)
        .def_readonly("magnitude", &Violation::magnitude)
        .def("__repr__", [](const Violation& v) {
            return "Violation('" + v.what + "', s=" + std::to_string(v.state) +
                   ", a=" + std::to_string(v.action) + ")";
        });

    py::class_<ValueFunction>(m, "ValueFunction")
        .def_readonly("values", &ValueFunction::values);

    py::class_<PolicyEvaluation>(m, "PolicyEvaluation")
        .def_readonly("value", &PolicyEvaluation::value)
        .def_property_readonly("return_", [](const PolicyEvaluation& e) { return e.ret; });

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("recommendation", &SolveResult::recommendation)
        .def_readonly("effective", &SolveResult::effective)
        .def_readonly("value", &SolveResult::value)
        .def_property_readonly("return_", [](const SolveResult& r) { return r.ret; })
        .def_readonly("iterations", &SolveResult::iterations)
        .def_readonly("residual", &SolveResult::residual);

    py::class_<InstanceBundle>(m, "InstanceBundle")
        .def_readonly("name", &InstanceBundle::name)
        .def_readonly("description", &InstanceBundle::description)
        .def_readonly("instance", &InstanceBundle::instance)
        .def_readonly("state_names", &InstanceBundle::state_names)
        .def_readonly("action_names", &InstanceBundle::action_names)
        .def_readonly("transitions_required_external",
                      &InstanceBundle::transitions_required_external)
        .def("baseline_names",
             [](const InstanceBundle& b) {
                 std::vector<std::string> names;
                 for (const auto& [k, v] : b.baselines) names.push_back(k);
                 return names;
             })
        .def("baseline", [](const InstanceBundle& b, const std::string& name) {
            auto it = b.baselines.find(name);
            if (it == b.baselines.end()) throw py::key_error(name);
            return it->second;
        });

    m.def("validate_instance", &validate_instance, py::arg("instance"));
    m.def("validate_bundle", &validate_bundle, py::arg("bundle"));
    m.def(
        "evaluate_policy",
        [](const MdpInstance& i, const StationaryPolicy& p) { return evaluate_policy(i, p); },
        py::arg("instance"), py::arg("policy"));
    m.def("solve_nominal", &solve_nominal, py::arg("instance"), py::arg("tol") = 1e-10);
    m.def("effective_policy", &effective_policy, py::arg("alg"), py::arg("base"),
          py::arg("spec"));
    m.def("build_surrogate", &build_surrogate, py::arg("instance"), py::arg("base"),
          py::arg("spec"));
    m.def("build_surrogate_state_action", &build_surrogate_state_action, py::arg("instance"),
          py::arg("base"), py::arg("spec"));
    m.def("solve_adamdp", &solve_adamdp, py::arg("instance"), py::arg("base"), py::arg("spec"),
          py::arg("tol") = 1e-10);
    m.def(
        "export_lp",
        [](const MdpInstance& i, const StationaryPolicy& b, const AdherenceSpec& s,
           const std::string& path) {
            std::ofstream f(path);
            if (!f) throw std::runtime_error("cannot open for writing: " + path);
            export_lp(i, b, s, f);
        },
        py::arg("instance"), py::arg("base"), py::arg("spec"), py::arg("path"));
    m.def(
        "export_lp_string",
        [](const MdpInstance& i, const StationaryPolicy& b, const AdherenceSpec& s) {
            std::ostringstream os;
            export_lp(i, b, s, os);
            return os.str();
        },
        py::arg("instance"), py::arg("base"), py::arg("spec"));

    py::enum_<AdversaryKind>(m, "AdversaryKind")
        .value("Unconstrained", AdversaryKind::Unconstrained)
        .value("TimeInvariant", AdversaryKind::TimeInvariant)
        .value("StateInvariant", AdversaryKind::StateInvariant)
        .value("TimeStateInvariant", AdversaryKind::TimeStateInvariant);

    py::class_<BestResponse>(m, "BestResponse")
        .def_readonly("worst_u", &BestResponse::worst_u)
        .def_readonly("worst_return", &BestResponse::worst_return)
        .def_readonly("iterations", &BestResponse::iterations);

    m.def(
        "adversary_best_response",
        [](const MdpInstance& i, const StationaryPolicy& alg, const StationaryPolicy& base,
           AdversaryKind kind, double theta, double tol) {
            return adversary_best_response(i, alg, base, {kind, theta}, tol);
        },
        py::arg("instance"), py::arg("alg"), py::arg("base"), py::arg("kind"), py::arg("theta"),
        py::arg("tol") = 1e-10);

    py::class_<SaddleReport>(m, "SaddleReport")
        .def_readonly("theta", &SaddleReport::theta)
        .def_readonly("adamdp_return", &SaddleReport::adamdp_return)
        .def_readonly("unconstrained_return", &SaddleReport::unconstrained_return)
        .def_readonly("time_invariant_return", &SaddleReport::time_invariant_return)
        .def_readonly("max_u_deviation", &SaddleReport::max_u_deviation)
        .def_readonly("scalar_max_min", &SaddleReport::scalar_max_min)
        .def_readonly("scalar_min_max", &SaddleReport::scalar_min_max)
        .def_readonly("policies_enumerated", &SaddleReport::policies_enumerated)
        .def_readonly("grid_points", &SaddleReport::grid_points);

    m.def("check_saddle", &check_saddle, py::arg("instance"), py::arg("base"), py::arg("theta"),
          py::arg("tol") = 1e-6, py::arg("grid_points") = 1001);

    py::enum_<AdherenceDistribution>(m, "AdherenceDistribution")
        .value("Bernoulli", AdherenceDistribution::Bernoulli)
        .value("UniformMeanTheta", AdherenceDistribution::UniformMeanTheta)
        .value("Constant", AdherenceDistribution::Constant);

    py::class_<McReport>(m, "McReport")
        .def_readonly("mean", &McReport::mean)
        .def_readonly("std_error", &McReport::std_error)
        .def_readonly("trials", &McReport::trials)
        .def_readonly("horizon", &McReport::horizon)
        .def_readonly("seed", &McReport::seed)
        .def_readonly("truncation_bound", &McReport::truncation_bound);

    m.def("simulate_random_adherence", &simulate_random_adherence, py::arg("instance"),
          py::arg("alg"), py::arg("base"), py::arg("dist"), py::arg("theta"), py::arg("horizon"),
          py::arg("trials"), py::arg("seed"), py::arg("threads") = 0);

    py::class_<ThetaSegment>(m, "ThetaSegment")
        .def_readonly("lo", &ThetaSegment::lo)
        .def_readonly("hi", &ThetaSegment::hi)
        .def_readonly("recommendation", &ThetaSegment::recommendation);

    py::class_<ThetaSweep>(m, "ThetaSweep")
        .def_readonly("grid", &ThetaSweep::grid)
        .def_readonly("returns_opt", &ThetaSweep::returns_opt)
        .def_readonly("returns_naive", &ThetaSweep::returns_naive)
        .def_readonly("segment_ids", &ThetaSweep::segment_ids)
        .def_readonly("segments", &ThetaSweep::segments)
        .def_readonly("breakpoints", &ThetaSweep::breakpoints)
        .def_readonly("nominal_policy", &ThetaSweep::nominal_policy)
        .def_readonly("top_segment_is_nominal", &ThetaSweep::top_segment_is_nominal)
        .def_readonly("baseline_prefix_ok", &ThetaSweep::baseline_prefix_ok);

    m.def("theta_sweep", &theta_sweep, py::arg("instance"), py::arg("base"),
          py::arg("grid_size") = 101, py::arg("bisection_tol") = 1e-6, py::arg("tol") = 1e-10);
    m.def("deterioration_curve", &deterioration_curve, py::arg("instance"), py::arg("base"),
          py::arg("grid"), py::arg("tol") = 1e-10);

    py::class_<WorstCaseFamily>(m, "WorstCaseFamily")
        .def_readonly("bundle", &WorstCaseFamily::bundle)
        .def_readonly("lambda_", &WorstCaseFamily::lambda)
        .def_readonly("gap", &WorstCaseFamily::gap);

    m.def("worst_case_family", &worst_case_family, py::arg("min_gap"), py::arg("theta"));

    py::class_<ValueSimilarReport>(m, "ValueSimilarReport")
        .def_readonly("precondition_met", &ValueSimilarReport::precondition_met)
        .def_readonly("baseline_value", &ValueSimilarReport::baseline_value)
        .def_readonly("nominal_value", &ValueSimilarReport::nominal_value)
        .def_readonly("optimal_values", &ValueSimilarReport::optimal_values)
        .def_readonly("swapped_values", &ValueSimilarReport::swapped_values)
        .def_readonly("max_deviation", &ValueSimilarReport::max_deviation)
        .def_readonly("ok", &ValueSimilarReport::ok);

    m.def("value_similar_check", &value_similar_check, py::arg("instance"), py::arg("base"),
          py::arg("s_bar"), py::arg("thetas"), py::arg("tol") = 1e-6);

    py::class_<SuboptimalityBound>(m, "SuboptimalityBound")
        .def_readonly("bound", &SuboptimalityBound::bound)
        .def_readonly("actual", &SuboptimalityBound::actual);

    m.def("suboptimality_bound", &suboptimality_bound, py::arg("instance"), py::arg("base"),
          py::arg("alg"), py::arg("theta"), py::arg("tol") = 1e-10);

    py::class_<ConstrainedResult>(m, "ConstrainedResult")
        .def_readonly("worst_u", &ConstrainedResult::worst_u)
        .def_readonly("worst_return", &ConstrainedResult::worst_return)
        .def_readonly("subsets_evaluated", &ConstrainedResult::subsets_evaluated);

    m.def(
        "evaluate_constrained",
        [](const MdpInstance& i, const StationaryPolicy& alg, const StationaryPolicy& base,
           int k) { return evaluate_constrained(i, alg, base, {k}); },
        py::arg("instance"), py::arg("alg"), py::arg("base"), py::arg("k"));
    m.def(
        "export_mip",
        [](const MdpInstance& i, const StationaryPolicy& alg, const StationaryPolicy& base,
           int k, const std::string& path) {
            std::ofstream f(path);
            if (!f) throw std::runtime_error("cannot open for writing: " + path);
            export_mip(i, alg, base, {k}, f);
        },
        py::arg("instance"), py::arg("alg"), py::arg("base"), py::arg("k"), py::arg("path"));

    py::class_<BaselineAmbiguity>(m, "BaselineAmbiguity")
        .def(py::init([](const std::vector<std::vector<std::vector<double>>>& vertices) {
                 BaselineAmbiguity g;
                 g.num_states = static_cast<int>(vertices.size());
                 g.num_actions =
                     vertices.empty() || vertices[0].empty()
                         ? 0
                         : static_cast<int>(vertices[0][0].size());
                 g.vertices = vertices;
                 return g;
             }),
             py::arg("vertices"))
        .def_readonly("vertices", &BaselineAmbiguity::vertices);

    py::class_<RobustThetaResult>(m, "RobustThetaResult")
        .def_readonly("solution", &RobustThetaResult::solution)
        .def_readonly("certificate_max_min", &RobustThetaResult::certificate_max_min)
        .def_readonly("policies_enumerated", &RobustThetaResult::policies_enumerated)
        .def_readonly("grid_points", &RobustThetaResult::grid_points);

    m.def(
        "robust_theta_solve",
        [](const MdpInstance& i, const StationaryPolicy& base, double lo, double hi, double tol,
           int grid) { return robust_theta_solve(i, base, {lo, hi}, tol, grid); },
        py::arg("instance"), py::arg("base"), py::arg("theta_lo"), py::arg("theta_hi"),
        py::arg("tol") = 1e-10, py::arg("grid_points") = 101);

    py::class_<RobustBaselineResult>(m, "RobustBaselineResult")
        .def_readonly("recommendation", &RobustBaselineResult::recommendation)
        .def_readonly("worst_baseline", &RobustBaselineResult::worst_baseline)
        .def_readonly("value", &RobustBaselineResult::value)
        .def_property_readonly("return_", [](const RobustBaselineResult& r) { return r.ret; })
        .def_readonly("iterations", &RobustBaselineResult::iterations);

    m.def("robust_baseline_solve", &robust_baseline_solve, py::arg("instance"),
          py::arg("ambiguity"), py::arg("theta"), py::arg("tol") = 1e-10);

    m.def("toy_counterexample", &toy_counterexample, py::arg("lambda_"), py::arg("epsilon"));
    m.def("machine_replacement_template", &machine_replacement_template);
    m.def("healthcare_template", &healthcare_template);
    m.def(
        "load_bundle", [](const std::string& path) { return load_bundle(path); },
        py::arg("path"));
    m.def("save_bundle", &save_bundle, py::arg("bundle"), py::arg("path"));
}
