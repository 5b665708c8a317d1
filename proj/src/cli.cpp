#include "adamdp/cli.hpp"

#include "adamdp/adherence.hpp"
#include "adamdp/adversarial.hpp"
#include "adamdp/analysis.hpp"
#include "adamdp/constrained.hpp"
#include "adamdp/instances.hpp"
#include "adamdp/robust.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <iostream>
#include <optional>
#include <sstream>

namespace adamdp {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

struct CommonOpts {
    std::string instance_path;
    std::string builtin;
    double toy_lambda = 0.5;
    int toy_epsilon = -1;
    std::string baseline;
    std::string alg;
    double theta = -1.0;
    std::string theta_file;
    double tol = 1e-10;
    std::string out_path;
};

void add_instance_flags(CLI::App* cmd, CommonOpts& o) {
    auto* inst = cmd->add_option("--instance", o.instance_path, "instance bundle (JSON)");
    auto* built = cmd->add_option("--builtin", o.builtin,
                                  "built-in instance: toy | machine-replacement | healthcare");
    inst->excludes(built);
    cmd->add_option("--lambda", o.toy_lambda, "discount for --builtin toy")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9));
    cmd->add_option("--epsilon", o.toy_epsilon, "toy reward offset, -1 or +1");
}

InstanceBundle resolve_bundle(const CommonOpts& o, std::ostream& err) {
    if (!o.instance_path.empty()) {
        std::vector<std::string> warnings;
        InstanceBundle b = load_bundle(o.instance_path, &warnings);
        for (const auto& w : warnings) err << "warning: " << o.instance_path << ": " << w << "\n";
        return b;
    }
    if (o.builtin == "toy") return toy_counterexample(o.toy_lambda, o.toy_epsilon);
    if (o.builtin == "machine-replacement") return machine_replacement_template();
    if (o.builtin == "healthcare") return healthcare_template();
    throw std::invalid_argument("need --instance or a known --builtin name");
}

const StationaryPolicy& resolve_policy(const InstanceBundle& b, const std::string& name,
                                       const char* role) {
    auto it = b.baselines.find(name);
    if (it == b.baselines.end())
        throw std::invalid_argument(std::string(role) + " policy '" + name +
                                    "' not found in bundle '" + b.name + "'");
    return it->second;
}

AdherenceSpec resolve_spec(const CommonOpts& o, const MdpInstance& inst) {
    if (!o.theta_file.empty()) {
        std::ifstream in(o.theta_file);
        if (!in) throw std::runtime_error("cannot open: " + o.theta_file);
        nlohmann::json j = nlohmann::json::parse(in);
        if (j.contains("per_state"))
            return AdherenceSpec::per_state(j["per_state"].get<std::vector<double>>());
        if (j.contains("per_state_action")) {
            std::vector<double> flat;
            for (const auto& row : j["per_state_action"])
                for (const auto& x : row) flat.push_back(x.get<double>());
            return AdherenceSpec::per_state_action(flat, inst.num_states, inst.num_actions);
        }
        throw std::invalid_argument("theta file needs 'per_state' or 'per_state_action'");
    }
    if (o.theta < 0.0) throw std::invalid_argument("need --theta or --theta-file");
    return AdherenceSpec::scalar(o.theta);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

void require_complete(const InstanceBundle& b) {
    auto vs = validate_bundle(b);
    if (!vs.empty()) {
        std::ostringstream msg;
        msg << "instance failed validation:";
        for (const auto& v : vs) {
            msg << "\n  - " << v.what;
            if (v.state >= 0) msg << " (state " << v.state;
            if (v.action >= 0) msg << ", action " << v.action;
            if (v.state >= 0) msg << ")";
        }
        throw std::invalid_argument(msg.str());
    }
}

std::string policy_table(const InstanceBundle& b, const StationaryPolicy& pi) {
    std::ostringstream os;
    os << "state -> recommendation\n";
    for (int s = 0; s < pi.num_states; ++s) {
        std::string sname = s < static_cast<int>(b.state_names.size()) ? b.state_names[s]
                                                                       : std::to_string(s);
        os << "  " << sname << " -> ";
        if (pi.is_deterministic()) {
            int a = pi.action_at(s);
            os << (a < static_cast<int>(b.action_names.size()) ? b.action_names[a]
                                                               : std::to_string(a));
        } else {
            for (int a = 0; a < pi.num_actions; ++a) {
                if (a) os << " ";
                os << fmt(pi.prob(s, a));
            }
        }
        os << "\n";
    }
    return os.str();
}

int cmd_validate(const CommonOpts& o, std::ostream& out, std::ostream& err) {
    InstanceBundle b = resolve_bundle(o, err);
    auto vs = validate_bundle(b);
    if (vs.empty()) {
        out << "ok: " << b.name << " (" << b.instance.num_states << " states, "
            << b.instance.num_actions << " actions)\n";
        return 0;
    }
    out << vs.size() << " violation(s):\n";
    for (const auto& v : vs) {
        out << "  - " << v.what;
        if (v.state >= 0) out << " [s=" << v.state;
        if (v.action >= 0) out << " a=" << v.action;
        if (v.state >= 0) out << "]";
        out << "\n";
    }
    return 2;
}

int cmd_solve(const CommonOpts& o, std::ostream& out, std::ostream& err) {
    InstanceBundle b = resolve_bundle(o, err);
    require_complete(b);
    const auto& base = resolve_policy(b, o.baseline, "baseline");
    AdherenceSpec spec = resolve_spec(o, b.instance);
    SolveResult sol = solve_adamdp(b.instance, base, spec, o.tol);
    out << policy_table(b, sol.recommendation);
    out << "return = " << fmt(sol.ret) << "\n";
    out << "iterations = " << sol.iterations << "\n";
    out << "residual = " << fmt(sol.residual) << "\n";
    if (!o.out_path.empty()) {
        auto f = open_out(o.out_path);
        f << "state,value\n";
        for (int s = 0; s < b.instance.num_states; ++s)
            f << s << "," << fmt(sol.value.values[s]) << "\n";
    }
    return 0;
}

int cmd_sweep(const CommonOpts& o, int grid, double bisection_tol,
              const std::string& breakpoints_out, std::ostream& out, std::ostream& err) {
    InstanceBundle b = resolve_bundle(o, err);
    require_complete(b);
    const auto& base = resolve_policy(b, o.baseline, "baseline");
    ThetaSweep sweep = theta_sweep(b.instance, base, grid, bisection_tol, o.tol);

    std::ostringstream csv;
    csv << "theta,return_opt,return_naive,deterioration,segment_id\n";
    for (size_t i = 0; i < sweep.grid.size(); ++i) {
        double det = std::abs(sweep.returns_opt[i]) > 1e-12
                         ? (sweep.returns_opt[i] - sweep.returns_naive[i]) / sweep.returns_opt[i]
                         : std::numeric_limits<double>::quiet_NaN();
        csv << fmt(sweep.grid[i]) << "," << fmt(sweep.returns_opt[i]) << ","
            << fmt(sweep.returns_naive[i]) << "," << fmt(det) << "," << sweep.segment_ids[i]
            << "\n";
    }
    if (o.out_path.empty()) out << csv.str();
    else open_out(o.out_path) << csv.str();

    std::ostringstream bps;
    for (double bp : sweep.breakpoints) bps << fmt(bp) << "\n";
    std::string bp_path = breakpoints_out;
    if (bp_path.empty() && !o.out_path.empty()) bp_path = o.out_path + ".breakpoints";
    if (!bp_path.empty()) open_out(bp_path) << bps.str();
    else if (!sweep.breakpoints.empty()) err << "breakpoints:\n" << bps.str();
    return 0;
}

int cmd_simulate(const CommonOpts& o, const std::string& dist_name, int horizon, long trials,
                 uint64_t seed, std::ostream& out, std::ostream& err) {
    InstanceBundle b = resolve_bundle(o, err);
    require_complete(b);
    const auto& base = resolve_policy(b, o.baseline, "baseline");
    const auto& alg = resolve_policy(b, o.alg, "recommendation");
    AdherenceDistribution dist;
    if (dist_name == "bernoulli") dist = AdherenceDistribution::Bernoulli;
    else if (dist_name == "uniform") dist = AdherenceDistribution::UniformMeanTheta;
    else if (dist_name == "constant") dist = AdherenceDistribution::Constant;
    else throw std::invalid_argument("unknown --dist (bernoulli | uniform | constant)");
    if (o.theta < 0.0) throw std::invalid_argument("need --theta");
    McReport rep =
        simulate_random_adherence(b.instance, alg, base, dist, o.theta, horizon, trials, seed);
    out << "mean = " << fmt(rep.mean) << "\n";
    out << "std_error = " << fmt(rep.std_error) << "\n";
    out << "trials = " << rep.trials << ", horizon = " << rep.horizon << ", seed = " << rep.seed
        << "\n";
    out << "truncation_bound = " << fmt(rep.truncation_bound) << "\n";
    if (!o.out_path.empty()) {
        auto f = open_out(o.out_path);
        f << "mean,std_error,trials,horizon,seed,truncation_bound\n";
        f << fmt(rep.mean) << "," << fmt(rep.std_error) << "," << rep.trials << "," << rep.horizon
          << "," << rep.seed << "," << fmt(rep.truncation_bound) << "\n";
    }
    return 0;
}

int cmd_check_saddle(const CommonOpts& o, int grid, std::ostream& out, std::ostream& err) {
    InstanceBundle b = resolve_bundle(o, err);
    require_complete(b);
    const auto& base = resolve_policy(b, o.baseline, "baseline");
    if (o.theta < 0.0) throw std::invalid_argument("need --theta");
    SaddleReport rep = check_saddle(b.instance, base, o.theta, 1e-6, grid);
    out << "theta = " << fmt(rep.theta) << "\n";
    out << "adamdp_return = " << fmt(rep.adamdp_return) << "\n";
    out << "unconstrained_return = " << fmt(rep.unconstrained_return) << "\n";
    out << "time_invariant_return = " << fmt(rep.time_invariant_return) << "\n";
    out << "scalar_max_min = " << fmt(rep.scalar_max_min) << "\n";
    out << "scalar_min_max = " << fmt(rep.scalar_min_max) << "\n";
    out << "max_u_deviation = " << fmt(rep.max_u_deviation) << "\n";
    out << "policies_enumerated = " << rep.policies_enumerated << "\n";
    if (!o.out_path.empty()) {
        auto f = open_out(o.out_path);
        f << "theta,adamdp_return,unconstrained_return,time_invariant_return,scalar_max_min,"
             "scalar_min_max,max_u_deviation,policies_enumerated,grid_points\n";
        f << fmt(rep.theta) << "," << fmt(rep.adamdp_return) << ","
          << fmt(rep.unconstrained_return) << "," << fmt(rep.time_invariant_return) << ","
          << fmt(rep.scalar_max_min) << "," << fmt(rep.scalar_min_max) << ","
          << fmt(rep.max_u_deviation) << "," << rep.policies_enumerated << "," << rep.grid_points
          << "\n";
    }
    return 0;
}

int cmd_constrained(const CommonOpts& o, int k, std::ostream& out, std::ostream& err) {
    InstanceBundle b = resolve_bundle(o, err);
    require_complete(b);
    const auto& base = resolve_policy(b, o.baseline, "baseline");
    const auto& alg = resolve_policy(b, o.alg, "recommendation");
    ConstrainedResult res = evaluate_constrained(b.instance, alg, base, {k});
    out << "worst_return = " << fmt(res.worst_return) << "\n";
    out << "worst_u =";
    for (int u : res.worst_u) out << " " << u;
    out << "\n";
    out << "subsets_evaluated = " << res.subsets_evaluated << "\n";
    if (!o.out_path.empty()) {
        auto f = open_out(o.out_path);
        f << "k,worst_return";
        for (int s = 0; s < b.instance.num_states; ++s) f << ",u_" << s;
        f << "\n" << k << "," << fmt(res.worst_return);
        for (int u : res.worst_u) f << "," << u;
        f << "\n";
    }
    return 0;
}

int cmd_robust(const CommonOpts& o, double lo, double hi, int grid, std::ostream& out,
               std::ostream& err) {
    InstanceBundle b = resolve_bundle(o, err);
    require_complete(b);
    if (lo >= 0.0) {
        if (o.baseline.empty())
            throw std::invalid_argument("uncertain-adherence mode needs --baseline");
        const auto& base = resolve_policy(b, o.baseline, "baseline");
        RobustThetaResult res =
            robust_theta_solve(b.instance, base, {lo, hi < 0 ? 1.0 : hi}, o.tol, grid);
        out << policy_table(b, res.solution.recommendation);
        out << "robust_return = " << fmt(res.solution.ret) << "\n";
        out << "certificate_max_min = " << fmt(res.certificate_max_min) << "\n";
        out << "policies_enumerated = " << res.policies_enumerated << "\n";
        return 0;
    }
    if (!b.ambiguity)
        throw std::invalid_argument(
            "baseline-robust mode needs a baseline_ambiguity section in the instance file "
            "(or pass --theta-lo/--theta-hi for the uncertain-adherence mode)");
    if (o.theta < 0.0) throw std::invalid_argument("need --theta");
    RobustBaselineResult res = robust_baseline_solve(b.instance, *b.ambiguity, o.theta, o.tol);
    out << policy_table(b, res.recommendation);
    out << "robust_return = " << fmt(res.ret) << "\n";
    out << "iterations = " << res.iterations << "\n";
    return 0;
}

int cmd_export(const CommonOpts& o, const std::string& format, int k, std::ostream& out,
               std::ostream& err) {
    InstanceBundle b = resolve_bundle(o, err);
    require_complete(b);
    const auto& base = resolve_policy(b, o.baseline, "baseline");
    std::ostringstream model;
    if (format == "lp") {
        AdherenceSpec spec = resolve_spec(o, b.instance);
        export_lp(b.instance, base, spec, model);
    } else if (format == "mip") {
        const auto& alg = resolve_policy(b, o.alg, "recommendation");
        export_mip(b.instance, alg, base, {k}, model);
    } else {
        throw std::invalid_argument("unknown --format (lp | mip)");
    }
    if (o.out_path.empty()) out << model.str();
    else open_out(o.out_path) << model.str();
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"adherence-aware MDP solver"};
    app.require_subcommand(1);

    CommonOpts o;
    int grid = 101;
    double bisection_tol = 1e-6;
    std::string breakpoints_out;
    std::string dist_name = "bernoulli";
    int horizon = 1000;
    long trials = 10000;
    uint64_t seed = 0;
    int k = 0;
    double theta_lo = -1.0, theta_hi = -1.0;
    std::string format = "lp";
    int saddle_grid = 1001;

    auto add_common = [&](CLI::App* cmd, bool needs_baseline) {
        add_instance_flags(cmd, o);
        if (needs_baseline)
            cmd->add_option("--baseline", o.baseline, "baseline policy name")->required();
        auto* theta_opt =
            cmd->add_option("--theta", o.theta, "scalar adherence level")
                ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--theta-file", o.theta_file,
                        "JSON file with per_state or per_state_action levels")
            ->excludes(theta_opt);
        cmd->add_option("--tol", o.tol, "solver tolerance");
        cmd->add_option("--out", o.out_path, "output file (CSV or model)");
        return cmd;
    };

    auto* c_validate = app.add_subcommand("validate", "check instance invariants");
    add_instance_flags(c_validate, o);

    auto* c_solve = add_common(app.add_subcommand("solve", "optimal recommendation at a fixed "
                                                           "adherence level"),
                               true);

    auto* c_sweep = add_common(
        app.add_subcommand("sweep", "solution path over the adherence level"), true);
    c_sweep->add_option("--grid", grid, "number of grid points");
    c_sweep->add_option("--bisection-tol", bisection_tol, "breakpoint refinement width");
    c_sweep->add_option("--breakpoints-out", breakpoints_out, "side file for breakpoints");

    auto* c_sim = add_common(
        app.add_subcommand("simulate", "Monte-Carlo rollout of random adherence"), true);
    c_sim->add_option("--alg", o.alg, "recommendation policy name")->required();
    c_sim->add_option("--dist", dist_name, "bernoulli | uniform | constant");
    c_sim->add_option("--horizon", horizon, "rollout length");
    c_sim->add_option("--trials", trials, "number of trajectories");
    c_sim->add_option("--seed", seed, "PRNG seed");

    auto* c_saddle = add_common(
        app.add_subcommand("check-saddle", "verify the adversarial equivalences"), true);
    c_saddle->add_option("--grid", saddle_grid, "scalar-adversary grid size");

    auto* c_con = add_common(
        app.add_subcommand("constrained", "worst case over cardinality-bounded adherence"), true);
    c_con->add_option("--k", k, "max adhering states")->required();
    c_con->add_option("--alg", o.alg, "recommendation policy name")->required();

    auto* c_rob = add_common(app.add_subcommand("robust", "robust adherence or baseline solve"),
                             false);
    c_rob->add_option("--baseline", o.baseline,
                      "baseline policy name (uncertain-adherence mode)");
    c_rob->add_option("--theta-lo", theta_lo, "adherence interval lower end");
    c_rob->add_option("--theta-hi", theta_hi, "adherence interval upper end");
    c_rob->add_option("--grid", grid, "certificate grid size");

    auto* c_exp = add_common(app.add_subcommand("export", "write LP/MIP model files"), true);
    c_exp->add_option("--format", format, "lp | mip")->required();
    c_exp->add_option("--k", k, "cardinality budget (mip)");
    c_exp->add_option("--alg", o.alg, "recommendation policy name (mip)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11 prints help itself for --help; route messages to our streams
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (c_validate->parsed()) return cmd_validate(o, out, err);
        if (c_solve->parsed()) return cmd_solve(o, out, err);
        if (c_sweep->parsed()) return cmd_sweep(o, grid, bisection_tol, breakpoints_out, out, err);
        if (c_sim->parsed()) return cmd_simulate(o, dist_name, horizon, trials, seed, out, err);
        if (c_saddle->parsed()) return cmd_check_saddle(o, saddle_grid, out, err);
        if (c_con->parsed()) return cmd_constrained(o, k, out, err);
        if (c_rob->parsed()) return cmd_robust(o, theta_lo, theta_hi, grid, out, err);
        if (c_exp->parsed()) return cmd_export(o, format, k, out, err);
        err << "error: no command\n";
        return 2;
    } catch (const GuardExceeded& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::string what = e.what();
        err << "error: " << what << "\n";
        bool io = what.rfind("cannot open", 0) == 0 || what.rfind("failed writing", 0) == 0;
        return io ? 1 : 2;
    }
}

} // namespace adamdp
