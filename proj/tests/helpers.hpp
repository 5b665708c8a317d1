#pragma once

// Shared test utilities: seeded random instances/policies, deterministic
// policy enumeration, and the toy instance's closed-form returns used as
// oracles.

#include "adamdp/mdp.hpp"
#include "adamdp/rng.hpp"

#include <cmath>
#include <vector>

namespace testutil {

using adamdp::MdpInstance;
using adamdp::Rng;
using adamdp::StationaryPolicy;

inline MdpInstance random_instance(int S, int A, uint64_t seed, double lambda = 0.9) {
    Rng rng(seed);
    MdpInstance m(S, A, lambda);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double sum = 0.0;
            std::vector<double> row(S);
            for (int t = 0; t < S; ++t) {
                row[t] = -std::log(1.0 - rng.next_double());
                sum += row[t];
            }
            for (int t = 0; t < S; ++t) {
                m.p(s, a, t) = row[t] / sum;
                m.r(s, a, t) = 2.0 * rng.next_double() - 1.0;
            }
        }
    double sum = 0.0;
    for (int s = 0; s < S; ++s) {
        m.initial_dist[s] = -std::log(1.0 - rng.next_double());
        sum += m.initial_dist[s];
    }
    for (int s = 0; s < S; ++s) m.initial_dist[s] /= sum;
    return m;
}

inline StationaryPolicy random_deterministic(int S, int A, uint64_t seed) {
    Rng rng(seed);
    std::vector<int> acts(S);
    for (int s = 0; s < S; ++s) acts[s] = static_cast<int>(rng.next_u64() % A);
    return StationaryPolicy::deterministic(S, A, acts);
}

inline StationaryPolicy random_policy(int S, int A, uint64_t seed) {
    Rng rng(seed);
    StationaryPolicy pi(S, A);
    for (int s = 0; s < S; ++s) {
        double sum = 0.0;
        for (int a = 0; a < A; ++a) {
            pi.prob(s, a) = -std::log(1.0 - rng.next_double());
            sum += pi.prob(s, a);
        }
        for (int a = 0; a < A; ++a) pi.prob(s, a) /= sum;
    }
    return pi;
}

template <typename F> inline void for_each_deterministic(int S, int A, F&& f) {
    std::vector<int> acts(S, 0);
    while (true) {
        f(acts);
        int s = 0;
        while (s < S && ++acts[s] == A) acts[s++] = 0;
        if (s == S) break;
    }
}

// Closed-form returns of the bundled toy policies. "alg" takes the detour
// through the 0.1-reward state; the mixture return is quadratic in theta.
inline double toy_base_return(double l) { return l * l / (1.0 - l); }
inline double toy_alg_return(double l) { return 0.1 * l + l * l / (1.0 - l); }
inline double toy_mix_return(double l, int eps, double th) {
    double rb = toy_base_return(l);
    double high = (1.0 + eps) * rb; // landing in the absorbing 1+eps state
    return th * (0.1 * l + th * rb + (1.0 - th) * high) +
           (1.0 - th) * (th * high + (1.0 - th) * rb);
}
inline double toy_theta_bar(double l) { return 1.0 - 0.1 * (1.0 - l) / l; }
inline double toy_theta_tilde(double l) { return 1.0 - 0.05 * (1.0 - l) / l; }

// Effective return when the nominal-optimal policy (which routes the middle
// state to the unit-reward absorber) is recommended on the eps=-1 toy.
inline double toy_nominal_mix_return(double l, double th) {
    double rb = toy_base_return(l);
    return th * (0.1 * l + th * rb) + (1.0 - th) * rb;
}

inline bool same_policy(const StationaryPolicy& a, const StationaryPolicy& b) {
    return a.num_states == b.num_states && a.num_actions == b.num_actions && a.probs == b.probs;
}

} // namespace testutil
