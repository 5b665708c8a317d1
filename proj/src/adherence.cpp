#include "adamdp/adherence.hpp"

#include "lp_writer.hpp"
#include "vi_core.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace adamdp {

namespace {

void check_levels(const std::vector<double>& levels) {
    for (double x : levels)
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("adherence level outside [0,1]");
}

} // namespace

AdherenceSpec AdherenceSpec::scalar(double theta) {
    AdherenceSpec spec;
    spec.kind = Kind::Scalar;
    spec.levels = {theta};
    check_levels(spec.levels);
    return spec;
}

AdherenceSpec AdherenceSpec::per_state(std::vector<double> theta_s) {
    AdherenceSpec spec;
    spec.kind = Kind::PerState;
    spec.num_states = static_cast<int>(theta_s.size());
    spec.levels = std::move(theta_s);
    check_levels(spec.levels);
    return spec;
}

AdherenceSpec AdherenceSpec::per_state_action(std::vector<double> theta_sa, int states,
                                              int actions) {
    if (theta_sa.size() != static_cast<size_t>(states) * actions)
        throw std::invalid_argument("per-state-action levels must have S*A entries");
    AdherenceSpec spec;
    spec.kind = Kind::PerStateAction;
    spec.num_states = states;
    spec.num_actions = actions;
    spec.levels = std::move(theta_sa);
    check_levels(spec.levels);
    return spec;
}

void AdherenceSpec::check_compatible(const MdpInstance& inst) const {
    if (kind == Kind::Scalar) return;
    if (num_states != inst.num_states)
        throw std::invalid_argument("adherence spec state count mismatch");
    if (kind == Kind::PerStateAction && num_actions != inst.num_actions)
        throw std::invalid_argument("adherence spec action count mismatch");
}

StationaryPolicy effective_policy(const StationaryPolicy& alg, const StationaryPolicy& base,
                                  const AdherenceSpec& spec) {
    if (alg.num_states != base.num_states || alg.num_actions != base.num_actions)
        throw std::invalid_argument("policy dimensions mismatch");
    const int S = alg.num_states, A = alg.num_actions;
    StationaryPolicy eff(S, A);
    if (spec.kind == AdherenceSpec::Kind::PerStateAction) {
        if (!base.is_deterministic())
            throw std::invalid_argument(
                "per-state-action adherence requires a deterministic baseline");
        for (int s = 0; s < S; ++s) {
            int b = base.action_at(s);
            double kept = 0.0;
            for (int a = 0; a < A; ++a) {
                if (a == b) continue;
                double x = alg.prob(s, a) * spec.at(s, a);
                eff.prob(s, a) = x;
                kept += x;
            }
            eff.prob(s, b) = 1.0 - kept;
        }
        return eff;
    }
    for (int s = 0; s < S; ++s) {
        double th = spec.at(s);
        for (int a = 0; a < A; ++a)
            eff.prob(s, a) = th * alg.prob(s, a) + (1.0 - th) * base.prob(s, a);
    }
    return eff;
}

MdpInstance build_surrogate(const MdpInstance& inst, const StationaryPolicy& base,
                            const AdherenceSpec& spec) {
    if (spec.kind == AdherenceSpec::Kind::PerStateAction)
        throw std::invalid_argument("use build_surrogate_state_action for per-state-action specs");
    require_compatible(inst, base);
    spec.check_compatible(inst);
    const int S = inst.num_states, A = inst.num_actions;
    const std::vector<double> R = inst.expected_rewards();
    MdpInstance out(S, A, inst.discount);
    out.initial_dist = inst.initial_dist;
    for (int s = 0; s < S; ++s) {
        double th = spec.at(s);
        // Baseline-induced row and expected reward at s.
        std::vector<double> row(S, 0.0);
        double rbase = 0.0;
        for (int a = 0; a < A; ++a) {
            double w = base.prob(s, a);
            if (w == 0.0) continue;
            for (int t = 0; t < S; ++t) row[t] += w * inst.p(s, a, t);
            rbase += w * R[static_cast<size_t>(s) * A + a];
        }
        for (int a = 0; a < A; ++a) {
            double rmix = th * R[static_cast<size_t>(s) * A + a] + (1.0 - th) * rbase;
            for (int t = 0; t < S; ++t) {
                out.p(s, a, t) = th * inst.p(s, a, t) + (1.0 - th) * row[t];
                out.r(s, a, t) = rmix; // state-action reward, replicated across successors
            }
        }
    }
    return out;
}

MdpInstance build_surrogate_state_action(const MdpInstance& inst, const StationaryPolicy& base,
                                         const AdherenceSpec& spec) {
    if (spec.kind != AdherenceSpec::Kind::PerStateAction)
        throw std::invalid_argument("spec must be per-state-action");
    require_compatible(inst, base);
    spec.check_compatible(inst);
    if (!base.is_deterministic())
        throw std::invalid_argument("per-state-action adherence requires a deterministic baseline");
    const int S = inst.num_states, A = inst.num_actions;
    const std::vector<double> R = inst.expected_rewards();
    MdpInstance out(S, A, inst.discount);
    out.initial_dist = inst.initial_dist;
    for (int s = 0; s < S; ++s) {
        int b = base.action_at(s);
        double rb = R[static_cast<size_t>(s) * A + b];
        for (int a = 0; a < A; ++a) {
            double th = spec.at(s, a);
            double rmix = th * R[static_cast<size_t>(s) * A + a] + (1.0 - th) * rb;
            for (int t = 0; t < S; ++t) {
                out.p(s, a, t) = th * inst.p(s, a, t) + (1.0 - th) * inst.p(s, b, t);
                out.r(s, a, t) = rmix;
            }
        }
    }
    return out;
}

std::vector<double> apply_adherence_operator(const MdpInstance& inst,
                                             const StationaryPolicy& base,
                                             const AdherenceSpec& spec,
                                             const std::vector<double>& v) {
    if (spec.kind == AdherenceSpec::Kind::PerStateAction)
        throw std::invalid_argument("per-state-action specs are solved through their surrogate");
    require_compatible(inst, base);
    spec.check_compatible(inst);
    if (v.size() != static_cast<size_t>(inst.num_states))
        throw std::invalid_argument("value vector size mismatch");
    const int S = inst.num_states, A = inst.num_actions;
    const std::vector<double> R = inst.expected_rewards();
    std::vector<double> out(S, 0.0), q(A, 0.0);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            double dot = 0.0;
            for (int t = 0; t < S; ++t) dot += inst.p(s, a, t) * v[t];
            q[a] = R[static_cast<size_t>(s) * A + a] + inst.discount * dot;
        }
        out[s] = detail::mixed_backup(q, base, s, spec.at(s));
    }
    return out;
}

SolveResult solve_adamdp(const MdpInstance& inst, const StationaryPolicy& base,
                         const AdherenceSpec& spec, double tol) {
    require_valid(inst);
    require_compatible(inst, base);
    spec.check_compatible(inst);

    if (spec.kind == AdherenceSpec::Kind::PerStateAction) {
        MdpInstance surrogate = build_surrogate_state_action(inst, base, spec);
        SolveResult nominal = solve_nominal(surrogate, tol);
        SolveResult out;
        out.recommendation = nominal.recommendation;
        out.effective = effective_policy(out.recommendation, base, spec);
        auto eval = evaluate_policy(inst, out.effective);
        out.value = std::move(eval.value);
        out.ret = eval.ret;
        out.iterations = nominal.iterations;
        out.residual = nominal.residual;
        return out;
    }

    auto vi = detail::value_iterate(inst, base, [&](int s) { return spec.at(s); }, tol);
    SolveResult out;
    out.recommendation = vi.greedy;
    out.effective = effective_policy(out.recommendation, base, spec);
    auto eval = evaluate_policy(inst, out.effective);
    out.value = std::move(eval.value);
    out.ret = eval.ret;
    out.iterations = vi.iterations;
    out.residual = vi.residual;
    return out;
}

void export_lp(const MdpInstance& inst, const StationaryPolicy& base, const AdherenceSpec& spec,
               std::ostream& sink) {
    MdpInstance sur = build_surrogate(inst, base, spec); // validates inputs
    const int S = sur.num_states, A = sur.num_actions;
    const std::vector<double> R = sur.expected_rewards();
    auto var = [](int s) { return "v_" + std::to_string(s); };

    sink << "\\ adherence-aware MDP value LP\n";
    sink << "Minimize\n obj: ";
    detail::LinExpr obj;
    for (int s = 0; s < S; ++s) obj.add(var(s), sur.initial_dist[s]);
    obj.print(sink);
    sink << "\nSubject To\n";
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            detail::LinExpr lhs;
            lhs.add(var(s), 1.0);
            for (int t = 0; t < S; ++t) lhs.add(var(t), -sur.discount * sur.p(s, a, t));
            detail::print_constraint(sink, "c_" + std::to_string(s) + "_" + std::to_string(a),
                                     lhs, ">=", R[static_cast<size_t>(s) * A + a]);
        }
    sink << "Bounds\n";
    for (int s = 0; s < S; ++s) sink << " " << var(s) << " free\n";
    sink << "End\n";
    if (!sink) throw std::runtime_error("failed writing LP model");
}

} // namespace adamdp
