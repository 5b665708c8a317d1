#include "adamdp/robust.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace adamdp {

namespace {

long policy_space_size(int num_states, int num_actions, long guard) {
    long n = 1;
    for (int s = 0; s < num_states; ++s) {
        n *= num_actions;
        if (n > guard) return -1;
    }
    return n;
}

bool next_assignment(std::vector<int>& actions, int num_actions) {
    for (size_t s = 0; s < actions.size(); ++s) {
        if (++actions[s] < num_actions) return true;
        actions[s] = 0;
    }
    return false;
}

void check_ambiguity(const MdpInstance& inst, const BaselineAmbiguity& g) {
    if (g.num_states != inst.num_states || g.num_actions != inst.num_actions)
        throw std::invalid_argument("ambiguity dimensions do not match instance");
    if (static_cast<int>(g.vertices.size()) != inst.num_states)
        throw std::invalid_argument("need one vertex list per state");
    for (int s = 0; s < inst.num_states; ++s) {
        if (g.vertices[s].empty())
            throw std::invalid_argument("empty vertex list at state " + std::to_string(s));
        if (g.vertices[s].size() > 64)
            throw GuardExceeded("vertex guard exceeded at state " + std::to_string(s));
        for (const auto& vertex : g.vertices[s]) {
            if (static_cast<int>(vertex.size()) != inst.num_actions)
                throw std::invalid_argument("vertex arity mismatch at state " + std::to_string(s));
            double sum = 0.0;
            for (double x : vertex) {
                if (!(x >= -1e-9)) throw std::invalid_argument("negative vertex probability");
                sum += x;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw std::invalid_argument("vertex does not sum to 1 at state " +
                                            std::to_string(s));
        }
    }
}

} // namespace

RobustThetaResult robust_theta_solve(const MdpInstance& inst, const StationaryPolicy& base,
                                     ThetaInterval interval, double tol, int grid_points) {
    if (!(interval.lo >= 0.0 && interval.lo <= interval.hi && interval.hi <= 1.0))
        throw std::invalid_argument("need 0 <= lo <= hi <= 1");
    if (grid_points < 2) throw std::invalid_argument("grid needs at least 2 points");
    require_valid(inst);
    require_compatible(inst, base);
    long n_policies = policy_space_size(inst.num_states, inst.num_actions, 1'000'000);
    if (n_policies < 0)
        throw GuardExceeded("policy enumeration guard exceeded (|A|^|S| > 1e6)");

    RobustThetaResult out;
    out.solution = solve_adamdp(inst, base, AdherenceSpec::scalar(interval.lo), tol);
    out.grid_points = grid_points;
    out.policies_enumerated = n_policies;

    // The worst adherence level is the lower endpoint for every policy.
    // Re-derive max-min independently: enumerate recommendations against a
    // theta grid (which contains lo).
    std::vector<double> grid(grid_points);
    for (int i = 0; i < grid_points; ++i)
        grid[i] = interval.lo +
                  (interval.hi - interval.lo) * static_cast<double>(i) / (grid_points - 1);
    double max_min = -std::numeric_limits<double>::infinity();
    std::vector<int> actions(inst.num_states, 0);
    do {
        StationaryPolicy pi =
            StationaryPolicy::deterministic(inst.num_states, inst.num_actions, actions);
        double worst = std::numeric_limits<double>::infinity();
        for (double theta : grid) {
            StationaryPolicy eff = effective_policy(pi, base, AdherenceSpec::scalar(theta));
            worst = std::min(worst, evaluate_policy(inst, eff).ret);
        }
        max_min = std::max(max_min, worst);
    } while (next_assignment(actions, inst.num_actions));
    out.certificate_max_min = max_min;
    return out;
}

RobustBaselineResult robust_baseline_solve(const MdpInstance& inst,
                                           const BaselineAmbiguity& ambiguity, double theta,
                                           double tol) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must be in [0,1]");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    require_valid(inst);
    check_ambiguity(inst, ambiguity);

    const int S = inst.num_states, A = inst.num_actions;
    const double lambda = inst.discount;
    const double threshold = tol * (1.0 - lambda) / (2.0 * lambda);
    const std::vector<double> R = inst.expected_rewards();

    auto action_values = [&](int s, const std::vector<double>& v, std::vector<double>& q) {
        for (int a = 0; a < A; ++a) {
            double dot = 0.0;
            for (int t = 0; t < S; ++t) dot += inst.p(s, a, t) * v[t];
            q[a] = R[static_cast<size_t>(s) * A + a] + lambda * dot;
        }
    };

    // The per-state saddle objective is theta * (pi_s . q) + (1-theta) * (b . q),
    // additively separable, so the backup splits into a greedy max and a
    // vertex min.
    std::vector<double> v(S, 0.0), next(S, 0.0), q(A, 0.0);
    RobustBaselineResult out;
    const int max_iter = 5'000'000;
    for (int it = 1;; ++it) {
        double res = 0.0;
        for (int s = 0; s < S; ++s) {
            action_values(s, v, q);
            double best = q[0];
            for (int a = 1; a < A; ++a) best = std::max(best, q[a]);
            double worst = std::numeric_limits<double>::infinity();
            for (const auto& vertex : ambiguity.vertices[s]) {
                double dot = 0.0;
                for (int a = 0; a < A; ++a) dot += vertex[a] * q[a];
                worst = std::min(worst, dot);
            }
            next[s] = theta * best + (1.0 - theta) * worst;
            res = std::max(res, std::abs(next[s] - v[s]));
        }
        v = next;
        out.iterations = it;
        out.residual = res;
        if (res <= threshold) break;
        if (it >= max_iter) throw std::runtime_error("robust iteration did not converge");
    }

    out.recommendation = StationaryPolicy(S, A);
    out.worst_baseline = StationaryPolicy(S, A);
    for (int s = 0; s < S; ++s) {
        action_values(s, v, q);
        int best = 0;
        for (int a = 1; a < A; ++a)
            if (q[a] > q[best]) best = a;
        out.recommendation.prob(s, best) = 1.0;
        size_t worst_idx = 0;
        double worst = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < ambiguity.vertices[s].size(); ++j) {
            double dot = 0.0;
            for (int a = 0; a < A; ++a) dot += ambiguity.vertices[s][j][a] * q[a];
            if (dot < worst) {
                worst = dot;
                worst_idx = j;
            }
        }
        for (int a = 0; a < A; ++a)
            out.worst_baseline.prob(s, a) = ambiguity.vertices[s][worst_idx][a];
    }

    // At the fixed point the recommendation/worst-vertex pair is stationary,
    // so the robust value is the exact value of their mixture.
    StationaryPolicy eff =
        effective_policy(out.recommendation, out.worst_baseline, AdherenceSpec::scalar(theta));
    auto eval = evaluate_policy(inst, eff);
    out.value = std::move(eval.value);
    out.ret = eval.ret;
    return out;
}

} // namespace adamdp
