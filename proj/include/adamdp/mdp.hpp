#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace adamdp {

/// Thrown when an exhaustive-enumeration guard would be exceeded.
struct GuardExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense discounted MDP: transition tensor P[s][a][s'], reward tensor
/// r[s][a][s'], initial state distribution and discount factor in (0,1).
/// Instances are immutable after construction and safe to share between
/// concurrent solves.
struct MdpInstance {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> transitions; // [s][a][s'], row-stochastic per (s,a)
    std::vector<double> rewards;     // [s][a][s']
    std::vector<double> initial_dist;
    double discount = 0.0;

    MdpInstance() = default;
    MdpInstance(int states, int actions, double lambda)
        : num_states(states), num_actions(actions),
          transitions(static_cast<size_t>(states) * actions * states, 0.0),
          rewards(static_cast<size_t>(states) * actions * states, 0.0),
          initial_dist(states, 0.0), discount(lambda) {}

    size_t idx(int s, int a, int t) const {
        return (static_cast<size_t>(s) * num_actions + a) * num_states + t;
    }
    double p(int s, int a, int t) const { return transitions[idx(s, a, t)]; }
    double& p(int s, int a, int t) { return transitions[idx(s, a, t)]; }
    double r(int s, int a, int t) const { return rewards[idx(s, a, t)]; }
    double& r(int s, int a, int t) { return rewards[idx(s, a, t)]; }

    /// Expected one-step reward R[s][a] = P_sa . r_sa.
    std::vector<double> expected_rewards() const;
    double max_abs_reward() const;
};

/// Per-state distribution over actions; deterministic policies have a single
/// unit entry per row.
struct StationaryPolicy {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> probs; // [s][a]

    StationaryPolicy() = default;
    StationaryPolicy(int states, int actions)
        : num_states(states), num_actions(actions),
          probs(static_cast<size_t>(states) * actions, 0.0) {}

    static StationaryPolicy deterministic(int states, int actions,
                                          const std::vector<int>& action_per_state);

    double prob(int s, int a) const { return probs[static_cast<size_t>(s) * num_actions + a]; }
    double& prob(int s, int a) { return probs[static_cast<size_t>(s) * num_actions + a]; }

    bool is_deterministic(double tol = 1e-12) const;
    /// Action with the largest probability (lowest index on ties).
    int action_at(int s) const;
};

struct ValueFunction {
    std::vector<double> values;
};

/// A single invariant violation, with enough location info to act on it.
struct Violation {
    std::string what;
    int state = -1;
    int action = -1;
    double magnitude = 0.0;
};

/// Checks every instance invariant (row-stochastic transitions, initial
/// distribution, discount range, finiteness) and reports all violations.
/// Empty result means the instance is valid.
std::vector<Violation> validate_instance(const MdpInstance& inst);

/// Same checks for a policy against an instance's dimensions.
std::vector<Violation> validate_policy(const MdpInstance& inst, const StationaryPolicy& pi);

/// Throws std::invalid_argument listing the violations, if any.
void require_valid(const MdpInstance& inst);
void require_compatible(const MdpInstance& inst, const StationaryPolicy& pi);

struct PolicyEvaluation {
    ValueFunction value;
    double ret = 0.0; // initial_dist . value
};

/// Exact policy evaluation: solves (I - lambda P_pi) v = r_pi by dense
/// factorization. P_pi and r_pi are the policy-induced chain and one-step
/// rewards.
PolicyEvaluation evaluate_policy(const MdpInstance& inst, const StationaryPolicy& pi);

/// Fixed-point iteration v <- r_pi + lambda P_pi v, run until the residual
/// drops below residual_tol. Cross-check for the direct solve.
PolicyEvaluation evaluate_policy_iterative(const MdpInstance& inst, const StationaryPolicy& pi,
                                           double residual_tol = 1e-10);

/// Solver output shared by the nominal and adherence-aware solvers. The
/// reported value/return are exact evaluations of the extracted effective
/// policy, not the final iterate.
struct SolveResult {
    StationaryPolicy recommendation;
    StationaryPolicy effective;
    ValueFunction value;
    double ret = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

/// Classical value iteration from v0 = 0, stopping when
/// ||v - B(v)||_inf <= tol (1-lambda) / (2 lambda); greedy policy extracted
/// from the final iterate with lowest-action-index tie-breaking.
SolveResult solve_nominal(const MdpInstance& inst, double tol = 1e-10);

} // namespace adamdp
