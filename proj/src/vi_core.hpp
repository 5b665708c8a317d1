#pragma once

// Shared value-iteration core for the nominal and adherence-aware solvers.
// Internal to the library.

#include "adamdp/mdp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace adamdp::detail {

struct ViOutput {
    std::vector<double> value; // final iterate
    StationaryPolicy greedy;   // argmax_a q_sa at the final iterate, lowest index wins
    int iterations = 0;
    double residual = 0.0;
};

// One application of the mixed operator at state s. q[a] must hold
// R_sa + lambda * P_sa . v.
inline double mixed_backup(const std::vector<double>& q, const StationaryPolicy& base, int s,
                           double theta) {
    double best = q[0];
    for (size_t a = 1; a < q.size(); ++a) best = std::max(best, q[a]);
    double base_dot = 0.0;
    for (size_t a = 0; a < q.size(); ++a) base_dot += base.prob(s, static_cast<int>(a)) * q[a];
    return theta * best + (1.0 - theta) * base_dot;
}

// Value iteration for f_s(v) = theta_s max_a q_sa + (1-theta_s) base_s . q_s,
// from v0 = 0, stopping when ||v - f(v)||_inf <= tol (1-lambda)/(2 lambda).
// theta_of(s) supplies the per-state adherence level; theta == 1 recovers the
// classical Bellman operator.
template <typename ThetaFn>
ViOutput value_iterate(const MdpInstance& inst, const StationaryPolicy& base, ThetaFn theta_of,
                       double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const int S = inst.num_states, A = inst.num_actions;
    const double lambda = inst.discount;
    const double threshold = tol * (1.0 - lambda) / (2.0 * lambda);
    const std::vector<double> R = inst.expected_rewards();

    std::vector<double> v(S, 0.0), next(S, 0.0), q(A, 0.0);
    ViOutput out;
    const int max_iter = 5'000'000;
    for (int it = 1;; ++it) {
        double res = 0.0;
        for (int s = 0; s < S; ++s) {
            for (int a = 0; a < A; ++a) {
                double dot = 0.0;
                for (int t = 0; t < S; ++t) dot += inst.p(s, a, t) * v[t];
                q[a] = R[static_cast<size_t>(s) * A + a] + lambda * dot;
            }
            next[s] = mixed_backup(q, base, s, theta_of(s));
            res = std::max(res, std::abs(next[s] - v[s]));
        }
        v = next;
        out.iterations = it;
        out.residual = res;
        if (res <= threshold) break;
        if (it >= max_iter) throw std::runtime_error("value iteration did not converge");
    }

    out.greedy = StationaryPolicy(S, A);
    for (int s = 0; s < S; ++s) {
        int best = 0;
        double best_q = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < A; ++a) {
            double dot = 0.0;
            for (int t = 0; t < S; ++t) dot += inst.p(s, a, t) * v[t];
            double qa = R[static_cast<size_t>(s) * A + a] + lambda * dot;
            if (qa > best_q) {
                best_q = qa;
                best = a;
            }
        }
        out.greedy.prob(s, best) = 1.0;
    }
    out.value = std::move(v);
    return out;
}

} // namespace adamdp::detail
