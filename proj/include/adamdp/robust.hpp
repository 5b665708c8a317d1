#pragma once

#include "adamdp/adherence.hpp"
#include "adamdp/mdp.hpp"

#include <vector>

namespace adamdp {

/// Uncertainty interval for the adherence level.
struct ThetaInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Per-state vertex lists for an s-rectangular set of plausible baseline
/// policies. Each vertex is a distribution over actions.
struct BaselineAmbiguity {
    int num_states = 0;
    int num_actions = 0;
    std::vector<std::vector<std::vector<double>>> vertices; // [s][vertex][a]
};

struct RobustThetaResult {
    SolveResult solution;        // solve at the lower endpoint
    double certificate_max_min;  // grid/enumeration estimate of max-min
    long policies_enumerated = 0;
    int grid_points = 0;
};

/// Worst-case-over-theta recommendation. The optimum is attained at the
/// interval's lower endpoint; the certificate re-derives the max-min value by
/// enumerating all deterministic recommendations against a theta grid
/// (guarded by |A|^|S| <= 1e6).
RobustThetaResult robust_theta_solve(const MdpInstance& inst, const StationaryPolicy& base,
                                     ThetaInterval interval, double tol = 1e-10,
                                     int grid_points = 101);

struct RobustBaselineResult {
    StationaryPolicy recommendation;  // deterministic
    StationaryPolicy worst_baseline;  // per-state minimizing vertex at the fixed point
    ValueFunction value;              // robust fixed point
    double ret = 0.0;                 // initial_dist . value
    int iterations = 0;
    double residual = 0.0;
};

/// Worst-case-over-baseline recommendation for a vertex-listed s-rectangular
/// ambiguity set. Robust value iteration; the per-state saddle
///   max_{pi_s} min_{b in Gamma_s} theta T^pi_s(v) + (1-theta) T^b_s(v)
/// separates additively in (pi_s, b), so each backup is
/// theta max_a q_sa + (1-theta) min_vertex b . q_s, both attained at extreme
/// points.
RobustBaselineResult robust_baseline_solve(const MdpInstance& inst,
                                           const BaselineAmbiguity& ambiguity, double theta,
                                           double tol = 1e-10);

} // namespace adamdp
