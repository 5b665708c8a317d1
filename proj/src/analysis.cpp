#include "adamdp/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace adamdp {

namespace {

bool same_policy(const StationaryPolicy& a, const StationaryPolicy& b) {
    return a.num_states == b.num_states && a.num_actions == b.num_actions && a.probs == b.probs;
}

} // namespace

ThetaSweep theta_sweep(const MdpInstance& inst, const StationaryPolicy& base, int grid_size,
                       double bisection_tol, double tol) {
    if (grid_size < 2) throw std::invalid_argument("grid_size must be at least 2");
    if (!(bisection_tol > 0.0)) throw std::invalid_argument("bisection_tol must be positive");
    require_valid(inst);
    require_compatible(inst, base);

    ThetaSweep sweep;
    sweep.nominal_policy = solve_nominal(inst, tol).recommendation;

    auto recommend = [&](double theta) {
        return solve_adamdp(inst, base, AdherenceSpec::scalar(theta), tol).recommendation;
    };

    sweep.grid.resize(grid_size);
    sweep.returns_opt.resize(grid_size);
    sweep.returns_naive.resize(grid_size);
    std::vector<StationaryPolicy> recs(grid_size);
    for (int i = 0; i < grid_size; ++i) {
        double theta = static_cast<double>(i) / (grid_size - 1);
        sweep.grid[i] = theta;
        SolveResult sol = solve_adamdp(inst, base, AdherenceSpec::scalar(theta), tol);
        recs[i] = sol.recommendation;
        sweep.returns_opt[i] = sol.ret;
        StationaryPolicy naive_eff =
            effective_policy(sweep.nominal_policy, base, AdherenceSpec::scalar(theta));
        sweep.returns_naive[i] = evaluate_policy(inst, naive_eff).ret;
    }

    // Refine each grid-detected change by bisection on policy identity.
    sweep.segment_ids.assign(grid_size, 0);
    int seg = 0;
    std::vector<double> seg_lo{0.0};
    for (int i = 1; i < grid_size; ++i) {
        if (same_policy(recs[i], recs[i - 1])) {
            sweep.segment_ids[i] = seg;
            continue;
        }
        double lo = sweep.grid[i - 1], hi = sweep.grid[i];
        const StationaryPolicy& left = recs[i - 1];
        while (hi - lo > bisection_tol) {
            double mid = 0.5 * (lo + hi);
            if (same_policy(recommend(mid), left)) lo = mid;
            else hi = mid;
        }
        double bp = 0.5 * (lo + hi);
        sweep.breakpoints.push_back(bp);
        ++seg;
        sweep.segment_ids[i] = seg;
        seg_lo.push_back(bp);
    }
    for (size_t k = 0; k < seg_lo.size(); ++k) {
        ThetaSegment segment;
        segment.lo = seg_lo[k];
        segment.hi = k + 1 < seg_lo.size() ? seg_lo[k + 1] : 1.0;
        // representative recommendation: first grid point inside the segment
        for (int i = 0; i < grid_size; ++i)
            if (sweep.segment_ids[i] == static_cast<int>(k)) {
                segment.recommendation = recs[i];
                break;
            }
        sweep.segments.push_back(std::move(segment));
    }

    sweep.top_segment_is_nominal = same_policy(recs.back(), sweep.nominal_policy);
    sweep.baseline_prefix_ok = true;
    bool left_region_over = false;
    for (int i = 0; i < grid_size; ++i) {
        bool is_base = same_policy(recs[i], base);
        if (!is_base) left_region_over = true;
        else if (left_region_over) sweep.baseline_prefix_ok = false;
    }
    return sweep;
}

std::vector<double> deterioration_curve(const MdpInstance& inst, const StationaryPolicy& base,
                                        const std::vector<double>& grid, double tol) {
    require_valid(inst);
    require_compatible(inst, base);
    StationaryPolicy nominal = solve_nominal(inst, tol).recommendation;
    std::vector<double> out;
    out.reserve(grid.size());
    for (double theta : grid) {
        double opt = solve_adamdp(inst, base, AdherenceSpec::scalar(theta), tol).ret;
        if (std::abs(opt) < 1e-12)
            throw std::runtime_error("deterioration undefined: optimal return is zero at theta=" +
                                     std::to_string(theta));
        StationaryPolicy eff = effective_policy(nominal, base, AdherenceSpec::scalar(theta));
        double naive = evaluate_policy(inst, eff).ret;
        out.push_back((opt - naive) / opt);
    }
    return out;
}

WorstCaseFamily worst_case_family(double min_gap, double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must be in (0,1)");
    if (min_gap < 0.0) throw std::invalid_argument("min_gap must be nonnegative");

    // Closed-form gap of the toy instance when the nominal-optimal policy is
    // recommended under partial adherence: 2 theta (lambda^2/(1-lambda))
    // (theta_tilde - theta), with theta_tilde = 1 - 0.05 (1-lambda)/lambda.
    auto closed_form_gap = [&](double lambda) {
        double base_return = lambda * lambda / (1.0 - lambda);
        double theta_tilde = 1.0 - 0.05 * (1.0 - lambda) / lambda;
        return 2.0 * theta * base_return * (theta_tilde - theta);
    };

    double lambda = 0.9;
    const double margin = min_gap + 1e-6 * (1.0 + min_gap);
    for (int i = 0; i < 200 && closed_form_gap(lambda) < margin; ++i)
        lambda = 1.0 - 0.5 * (1.0 - lambda);
    if (closed_form_gap(lambda) < min_gap)
        throw std::runtime_error("could not reach the requested gap");

    WorstCaseFamily out;
    out.lambda = lambda;
    out.bundle = toy_counterexample(lambda, -1);
    const auto& base = out.bundle.baselines.at("base");
    const auto& alg = out.bundle.baselines.at("alg");
    StationaryPolicy eff = effective_policy(alg, base, AdherenceSpec::scalar(theta));
    out.gap = evaluate_policy(out.bundle.instance, base).ret -
              evaluate_policy(out.bundle.instance, eff).ret;
    return out;
}

ValueSimilarReport value_similar_check(const MdpInstance& inst, const StationaryPolicy& base,
                                       int s_bar, const std::vector<double>& thetas, double tol) {
    require_valid(inst);
    require_compatible(inst, base);
    if (s_bar < 0 || s_bar >= inst.num_states) throw std::invalid_argument("s_bar out of range");

    ValueSimilarReport rep;
    rep.nominal_value = solve_nominal(inst).value.values[s_bar];
    rep.baseline_value = evaluate_policy(inst, base).value.values[s_bar];
    rep.precondition_met = std::abs(rep.nominal_value - rep.baseline_value) <= 1e-8;
    if (!rep.precondition_met) return rep;

    rep.thetas = thetas;
    rep.ok = true;
    for (double theta : thetas) {
        SolveResult sol = solve_adamdp(inst, base, AdherenceSpec::scalar(theta));
        double v_opt = sol.value.values[s_bar];
        StationaryPolicy swapped = sol.recommendation;
        for (int a = 0; a < inst.num_actions; ++a)
            swapped.prob(s_bar, a) = base.prob(s_bar, a);
        StationaryPolicy eff = effective_policy(swapped, base, AdherenceSpec::scalar(theta));
        double v_swapped = evaluate_policy(inst, eff).value.values[s_bar];
        rep.optimal_values.push_back(v_opt);
        rep.swapped_values.push_back(v_swapped);
        double dev = std::max(std::abs(v_opt - rep.baseline_value),
                              std::abs(v_swapped - rep.baseline_value));
        rep.max_deviation = std::max(rep.max_deviation, dev);
        if (dev > tol) rep.ok = false;
    }
    return rep;
}

SuboptimalityBound suboptimality_bound(const MdpInstance& inst, const StationaryPolicy& base,
                                       const StationaryPolicy& alg, double theta, double tol) {
    require_valid(inst);
    require_compatible(inst, base);
    require_compatible(inst, alg);
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must be in [0,1]");

    SolveResult sol = solve_adamdp(inst, base, AdherenceSpec::scalar(theta), tol);
    StationaryPolicy eff = effective_policy(alg, base, AdherenceSpec::scalar(theta));
    ValueFunction v_alg = evaluate_policy(inst, eff).value;

    double actual = 0.0, v_norm = 0.0, max_l1 = 0.0;
    for (int s = 0; s < inst.num_states; ++s) {
        actual = std::max(actual, std::abs(sol.value.values[s] - v_alg.values[s]));
        v_norm = std::max(v_norm, std::abs(sol.value.values[s]));
        double l1 = 0.0;
        for (int a = 0; a < inst.num_actions; ++a)
            l1 += std::abs(sol.recommendation.prob(s, a) - alg.prob(s, a));
        max_l1 = std::max(max_l1, l1);
    }
    SuboptimalityBound out;
    out.bound = theta / (1.0 - inst.discount) * max_l1 * v_norm;
    out.actual = actual;
    return out;
}

} // namespace adamdp
