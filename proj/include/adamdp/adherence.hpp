#pragma once

#include "adamdp/mdp.hpp"

#include <iosfwd>
#include <vector>

namespace adamdp {

/// Adherence level specification: one scalar for all states, one level per
/// state, or one level per state-action pair. The per-state-action variant is
/// only defined against a deterministic baseline.
struct AdherenceSpec {
    enum class Kind { Scalar, PerState, PerStateAction };

    Kind kind = Kind::Scalar;
    int num_states = 0;  // 0 for Scalar
    int num_actions = 0; // 0 unless PerStateAction
    std::vector<double> levels;

    static AdherenceSpec scalar(double theta);
    static AdherenceSpec per_state(std::vector<double> theta_s);
    static AdherenceSpec per_state_action(std::vector<double> theta_sa, int states, int actions);

    double at(int s) const {
        return kind == Kind::Scalar ? levels[0] : levels[static_cast<size_t>(s)];
    }
    double at(int s, int a) const {
        return kind == Kind::PerStateAction
                   ? levels[static_cast<size_t>(s) * num_actions + a]
                   : at(s);
    }
    void check_compatible(const MdpInstance& inst) const;
};

/// Mixture policy actually executed by the decision maker.
/// Scalar/PerState: row s is theta_s * alg_s + (1 - theta_s) * base_s.
/// PerStateAction: probability theta_sa of keeping a sampled recommendation a,
/// falling back to the (deterministic) baseline action otherwise.
StationaryPolicy effective_policy(const StationaryPolicy& alg, const StationaryPolicy& base,
                                  const AdherenceSpec& spec);

/// Surrogate MDP whose nominal optimum is the optimal recommendation:
/// P'_sa = theta_s P_sa + (1-theta_s) sum_a' base_sa' P_sa', rewards blended
/// the same way and replicated across the successor axis. Scalar or PerState
/// adherence only.
MdpInstance build_surrogate(const MdpInstance& inst, const StationaryPolicy& base,
                            const AdherenceSpec& spec);

/// Per-state-action surrogate against a deterministic baseline:
/// P'_sa = theta_sa P_sa + (1-theta_sa) P_{s,base(s)}.
MdpInstance build_surrogate_state_action(const MdpInstance& inst, const StationaryPolicy& base,
                                         const AdherenceSpec& spec);

/// One application of the mixed backup operator
///   f_s(v) = max_a theta_s q_sa(v) + (1-theta_s) sum_a base_sa q_sa(v),
/// the classical Bellman operator when theta == 1. Exposed for property
/// checks and diagnostics; solve_adamdp iterates it.
std::vector<double> apply_adherence_operator(const MdpInstance& inst,
                                             const StationaryPolicy& base,
                                             const AdherenceSpec& spec,
                                             const std::vector<double>& v);

/// Adherence-aware solve. Value-iterates the mixed operator
///   f_s(v) = max_a theta_s q_sa(v) + (1-theta_s) sum_a base_sa q_sa(v)
/// from v0 = 0 with the same stopping rule as solve_nominal, extracts the
/// greedy deterministic recommendation, and reports the exact evaluation of
/// the resulting effective policy. PerStateAction specs are routed through
/// build_surrogate_state_action + solve_nominal.
SolveResult solve_adamdp(const MdpInstance& inst, const StationaryPolicy& base,
                         const AdherenceSpec& spec, double tol = 1e-10);

/// Writes the solve as a linear program in CPLEX LP text format: objective
/// min p0.v, one >= constraint per (s,a) in (s,a) order, all v_<s> free.
/// The model is a verification artifact; it is not solved in-process.
void export_lp(const MdpInstance& inst, const StationaryPolicy& base, const AdherenceSpec& spec,
               std::ostream& sink);

} // namespace adamdp
