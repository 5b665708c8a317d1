#pragma once

#include "adamdp/adherence.hpp"
#include "adamdp/mdp.hpp"

#include <cstdint>
#include <vector>

namespace adamdp {

/// Which consistency constraints bind the worst-case adherence decisions:
/// none (fresh choice per state and period), per-state but time-invariant,
/// per-period but state-invariant, or one shared scalar.
enum class AdversaryKind { Unconstrained, TimeInvariant, StateInvariant, TimeStateInvariant };

struct AdversaryModel {
    AdversaryKind kind = AdversaryKind::Unconstrained;
    double theta = 0.0; // lower bound of the adherence box [theta, 1]
};

struct BestResponse {
    std::vector<double> worst_u; // per-state minimizer in {theta, 1}; ties -> theta
    double worst_return = 0.0;   // exact evaluation of the worst-case mixture
    ValueFunction value;
    int iterations = 0;
    double residual = 0.0;
};

/// Worst-case adherence against a fixed recommendation, for the unconstrained
/// and time-invariant models (their values coincide for a fixed stationary
/// policy, so one min-Bellman iteration serves both). The inner minimum over
/// u in [theta,1] is linear, hence evaluated at the endpoints only.
BestResponse adversary_best_response(const MdpInstance& inst, const StationaryPolicy& alg,
                                     const StationaryPolicy& base, const AdversaryModel& model,
                                     double tol = 1e-10);

/// Everything check_saddle measures. The adversary has no advantage at the
/// optimal recommendation: worst u == theta and all four values agree.
struct SaddleReport {
    double theta = 0.0;
    double adamdp_return = 0.0;             // optimal effective return at theta
    double unconstrained_return = 0.0;      // best response at the optimal recommendation
    double time_invariant_return = 0.0;
    double max_u_deviation = 0.0;           // max_s |worst_u_s - theta| over both models
    double scalar_max_min = 0.0;            // shared-scalar adversary, grid over [theta,1]
    double scalar_min_max = 0.0;
    long policies_enumerated = 0;
    int grid_points = 0;
};

/// Exhaustive verification of the equivalence between the adversarial models
/// and the adherence-aware solve, on instances small enough to enumerate
/// every deterministic recommendation (guard |A|^|S| <= 1e6).
SaddleReport check_saddle(const MdpInstance& inst, const StationaryPolicy& base, double theta,
                          double tol = 1e-6, int grid_points = 1001);

enum class AdherenceDistribution { Bernoulli, UniformMeanTheta, Constant };

struct McReport {
    double mean = 0.0;
    double std_error = 0.0;
    long trials = 0;
    int horizon = 0;
    uint64_t seed = 0;
    // lambda^horizon * r_max / (1-lambda): what the finite rollout can miss
    double truncation_bound = 0.0;
};

/// Monte-Carlo rollout of the random-adherence model: at every period one
/// adherence weight u_t is sampled (shared across states) and the executed
/// action is drawn from u_t * alg + (1-u_t) * base at the visited state.
/// Per-trial derived seeds and an ordered compensated reduction make the
/// result independent of the worker count.
McReport simulate_random_adherence(const MdpInstance& inst, const StationaryPolicy& alg,
                                   const StationaryPolicy& base, AdherenceDistribution dist,
                                   double theta, int horizon, long trials, uint64_t seed,
                                   int threads = 0);

} // namespace adamdp
