#pragma once

#include "adamdp/adherence.hpp"
#include "adamdp/instances.hpp"
#include "adamdp/mdp.hpp"

#include <vector>

namespace adamdp {

struct ThetaSegment {
    double lo = 0.0;
    double hi = 0.0;
    StationaryPolicy recommendation; // constant on [lo, hi] at grid resolution
};

/// Solution-path summary over the adherence level: per-grid-point optimal and
/// naive returns, constant-recommendation segments, and bisection-refined
/// breakpoints. Segments are closed intervals and share endpoints at
/// breakpoints, where both neighboring recommendations are optimal.
struct ThetaSweep {
    std::vector<double> grid;
    std::vector<double> returns_opt;   // R of the optimal effective policy
    std::vector<double> returns_naive; // R when recommending the nominal optimum
    std::vector<int> segment_ids;      // per grid point
    std::vector<ThetaSegment> segments;
    std::vector<double> breakpoints;
    StationaryPolicy nominal_policy;
    bool top_segment_is_nominal = false; // recommendation at theta=1 equals the nominal optimum
    bool baseline_prefix_ok = false;     // grid points matching the baseline form a prefix
};

ThetaSweep theta_sweep(const MdpInstance& inst, const StationaryPolicy& base, int grid_size = 101,
                       double bisection_tol = 1e-6, double tol = 1e-10);

/// Relative loss from recommending the adherence-oblivious nominal optimum:
/// (R_opt(theta) - R_naive(theta)) / R_opt(theta) per grid point. Errors out
/// on a (near-)zero denominator.
std::vector<double> deterioration_curve(const MdpInstance& inst, const StationaryPolicy& base,
                                        const std::vector<double>& grid, double tol = 1e-10);

struct WorstCaseFamily {
    InstanceBundle bundle; // toy instance at the chosen discount
    double lambda = 0.0;
    double gap = 0.0; // measured R(base) - R(effective nominal-optimal mixture)
};

/// Finds a discount factor for which ignoring partial adherence costs at
/// least `min_gap` return against the baseline, by pushing the toy instance's
/// discount towards 1 along its closed-form gap. The reported gap is
/// re-measured with exact policy evaluation.
WorstCaseFamily worst_case_family(double min_gap, double theta);

struct ValueSimilarReport {
    bool precondition_met = false; // baseline matches the nominal optimum at s_bar
    double baseline_value = 0.0;
    double nominal_value = 0.0;
    std::vector<double> thetas;
    std::vector<double> optimal_values;  // value of the optimal effective policy at s_bar
    std::vector<double> swapped_values;  // after re-recommending the baseline row at s_bar
    double max_deviation = 0.0;
    bool ok = false;
};

/// When the baseline achieves the optimal nominal value at s_bar, the value
/// at s_bar is invariant across adherence levels and the baseline row can be
/// recommended there at no cost. Verifies both statements on a theta grid.
ValueSimilarReport value_similar_check(const MdpInstance& inst, const StationaryPolicy& base,
                                       int s_bar, const std::vector<double>& thetas,
                                       double tol = 1e-6);

struct SuboptimalityBound {
    double bound = 0.0;  // theta/(1-lambda) * max_s ||rec*_s - alg_s||_1 * ||v*||_inf
    double actual = 0.0; // ||v* - v_eff(alg)||_inf
};

/// Bound on the value loss of recommending `alg` instead of the optimal
/// recommendation at the given adherence level, together with the measured
/// loss. The bound is zero exactly when theta is zero or `alg` is the optimal
/// recommendation. It is reliable for nonnegative rewards at moderate
/// adherence levels; with heavily signed rewards or theta below (1-lambda)/2
/// the measured loss can exceed it, so both numbers are returned and callers
/// decide.
SuboptimalityBound suboptimality_bound(const MdpInstance& inst, const StationaryPolicy& base,
                                       const StationaryPolicy& alg, double theta,
                                       double tol = 1e-10);

} // namespace adamdp
