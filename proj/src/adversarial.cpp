#include "adamdp/adversarial.hpp"

#include "adamdp/rng.hpp"
#include "vi_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace adamdp {

namespace {

// Enumerates deterministic policies as mixed-radix counters; returns false
// once the space is exhausted.
bool next_assignment(std::vector<int>& actions, int num_actions) {
    for (size_t s = 0; s < actions.size(); ++s) {
        if (++actions[s] < num_actions) return true;
        actions[s] = 0;
    }
    return false;
}

long policy_space_size(int num_states, int num_actions, long guard) {
    long n = 1;
    for (int s = 0; s < num_states; ++s) {
        n *= num_actions;
        if (n > guard) return -1;
    }
    return n;
}

StationaryPolicy per_state_mixture(const StationaryPolicy& alg, const StationaryPolicy& base,
                                   const std::vector<double>& u) {
    StationaryPolicy mix(alg.num_states, alg.num_actions);
    for (int s = 0; s < alg.num_states; ++s)
        for (int a = 0; a < alg.num_actions; ++a)
            mix.prob(s, a) = u[s] * alg.prob(s, a) + (1.0 - u[s]) * base.prob(s, a);
    return mix;
}

} // namespace

BestResponse adversary_best_response(const MdpInstance& inst, const StationaryPolicy& alg,
                                     const StationaryPolicy& base, const AdversaryModel& model,
                                     double tol) {
    if (model.kind != AdversaryKind::Unconstrained && model.kind != AdversaryKind::TimeInvariant)
        throw std::invalid_argument(
            "best response handles the unconstrained and time-invariant models; use check_saddle "
            "for the state-invariant ones");
    if (!(model.theta >= 0.0 && model.theta <= 1.0))
        throw std::invalid_argument("theta must be in [0,1]");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    require_valid(inst);
    require_compatible(inst, alg);
    require_compatible(inst, base);

    const int S = inst.num_states, A = inst.num_actions;
    const double lambda = inst.discount;
    const double theta = model.theta;
    const double threshold = tol * (1.0 - lambda) / (2.0 * lambda);
    const std::vector<double> R = inst.expected_rewards();

    auto policy_backup = [&](const StationaryPolicy& pi, int s, const std::vector<double>& v) {
        double acc = 0.0;
        for (int a = 0; a < A; ++a) {
            double w = pi.prob(s, a);
            if (w == 0.0) continue;
            double dot = 0.0;
            for (int t = 0; t < S; ++t) dot += inst.p(s, a, t) * v[t];
            acc += w * (R[static_cast<size_t>(s) * A + a] + lambda * dot);
        }
        return acc;
    };

    std::vector<double> v(S, 0.0), next(S, 0.0);
    BestResponse out;
    const int max_iter = 5'000'000;
    for (int it = 1;; ++it) {
        double res = 0.0;
        for (int s = 0; s < S; ++s) {
            double follow = policy_backup(alg, s, v);
            double fallback = policy_backup(base, s, v);
            // min over u in [theta,1] of u*follow + (1-u)*fallback
            double at_theta = theta * follow + (1.0 - theta) * fallback;
            next[s] = std::min(at_theta, follow);
            res = std::max(res, std::abs(next[s] - v[s]));
        }
        v = next;
        out.iterations = it;
        out.residual = res;
        if (res <= threshold) break;
        if (it >= max_iter) throw std::runtime_error("adversary iteration did not converge");
    }

    out.worst_u.assign(S, theta);
    for (int s = 0; s < S; ++s) {
        double follow = policy_backup(alg, s, v);
        double fallback = policy_backup(base, s, v);
        if (follow < fallback) out.worst_u[s] = 1.0; // adhering hurts, adversary adheres fully
    }
    auto eval = evaluate_policy(inst, per_state_mixture(alg, base, out.worst_u));
    out.value = std::move(eval.value);
    out.worst_return = eval.ret;
    return out;
}

SaddleReport check_saddle(const MdpInstance& inst, const StationaryPolicy& base, double theta,
                          double tol, int grid_points) {
    if (grid_points < 2) throw std::invalid_argument("grid needs at least 2 points");
    require_valid(inst);
    require_compatible(inst, base);
    long n_policies = policy_space_size(inst.num_states, inst.num_actions, 1'000'000);
    if (n_policies < 0)
        throw GuardExceeded("policy enumeration guard exceeded (|A|^|S| > 1e6)");

    SaddleReport rep;
    rep.theta = theta;
    rep.grid_points = grid_points;
    rep.policies_enumerated = n_policies;

    SolveResult sol = solve_adamdp(inst, base, AdherenceSpec::scalar(theta), 1e-10);
    rep.adamdp_return = sol.ret;

    auto binf = adversary_best_response(inst, sol.recommendation, base,
                                        {AdversaryKind::Unconstrained, theta});
    auto b1 = adversary_best_response(inst, sol.recommendation, base,
                                      {AdversaryKind::TimeInvariant, theta});
    rep.unconstrained_return = binf.worst_return;
    rep.time_invariant_return = b1.worst_return;
    for (int s = 0; s < inst.num_states; ++s) {
        rep.max_u_deviation = std::max(rep.max_u_deviation, std::abs(binf.worst_u[s] - theta));
        rep.max_u_deviation = std::max(rep.max_u_deviation, std::abs(b1.worst_u[s] - theta));
    }

    // Shared-scalar adversary: score every deterministic recommendation on a
    // u grid over [theta, 1] and form both orders of optimization.
    std::vector<double> grid(grid_points);
    for (int i = 0; i < grid_points; ++i)
        grid[i] = theta + (1.0 - theta) * static_cast<double>(i) / (grid_points - 1);
    std::vector<double> max_over_policies(grid_points,
                                          -std::numeric_limits<double>::infinity());
    double max_min = -std::numeric_limits<double>::infinity();
    std::vector<int> actions(inst.num_states, 0);
    do {
        StationaryPolicy pi =
            StationaryPolicy::deterministic(inst.num_states, inst.num_actions, actions);
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid_points; ++i) {
            StationaryPolicy eff = effective_policy(pi, base, AdherenceSpec::scalar(grid[i]));
            double ret = evaluate_policy(inst, eff).ret;
            worst = std::min(worst, ret);
            max_over_policies[i] = std::max(max_over_policies[i], ret);
        }
        max_min = std::max(max_min, worst);
    } while (next_assignment(actions, inst.num_actions));
    rep.scalar_max_min = max_min;
    rep.scalar_min_max = *std::min_element(max_over_policies.begin(), max_over_policies.end());
    (void)tol;
    return rep;
}

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ADAMDP_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

int sample_index(const double* weights, int n, double& unit) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += weights[i];
        if (unit < acc) return i;
    }
    return n - 1; // guard against accumulated rounding
}

double rollout(const MdpInstance& inst, const StationaryPolicy& alg, const StationaryPolicy& base,
               AdherenceDistribution dist, double theta, int horizon, Rng rng) {
    const int S = inst.num_states, A = inst.num_actions;
    double u_lo = std::max(0.0, 2.0 * theta - 1.0);
    double u_hi = std::min(1.0, 2.0 * theta);
    double unit = rng.next_double();
    int s = sample_index(inst.initial_dist.data(), S, unit);
    double acc = 0.0, discount = 1.0;
    for (int t = 0; t < horizon; ++t) {
        double u;
        switch (dist) {
        case AdherenceDistribution::Bernoulli: u = rng.next_double() < theta ? 1.0 : 0.0; break;
        case AdherenceDistribution::UniformMeanTheta:
            u = u_lo + (u_hi - u_lo) * rng.next_double();
            break;
        default: u = theta; break;
        }
        const StationaryPolicy& src = rng.next_double() < u ? alg : base;
        double ua = rng.next_double();
        int a = sample_index(&src.probs[static_cast<size_t>(s) * A], A, ua);
        double us = rng.next_double();
        int nxt = sample_index(&inst.transitions[inst.idx(s, a, 0)], S, us);
        acc += discount * inst.r(s, a, nxt);
        discount *= inst.discount;
        s = nxt;
    }
    return acc;
}

} // namespace

McReport simulate_random_adherence(const MdpInstance& inst, const StationaryPolicy& alg,
                                   const StationaryPolicy& base, AdherenceDistribution dist,
                                   double theta, int horizon, long trials, uint64_t seed,
                                   int threads) {
    if (horizon <= 0 || trials <= 0)
        throw std::invalid_argument("horizon and trials must be positive");
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must be in [0,1]");
    require_valid(inst);
    require_compatible(inst, alg);
    require_compatible(inst, base);

    std::vector<double> returns(trials);
    int workers = std::min<long>(resolve_threads(threads), trials);
    auto run_chunk = [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i)
            returns[i] = rollout(inst, alg, base, dist, theta, horizon,
                                 Rng::derive(seed, static_cast<uint64_t>(i)));
    };
    if (workers <= 1) {
        run_chunk(0, trials);
    } else {
        std::vector<std::thread> pool;
        long chunk = (trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            long lo = w * chunk, hi = std::min<long>(trials, lo + chunk);
            if (lo < hi) pool.emplace_back(run_chunk, lo, hi);
        }
        for (auto& t : pool) t.join();
    }

    // Compensated two-pass reduction in trial order: identical result for any
    // worker count.
    auto kahan_sum = [](const std::vector<double>& xs, auto term) {
        double sum = 0.0, carry = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) {
            double y = term(xs[i]) - carry;
            double t = sum + y;
            carry = (t - sum) - y;
            sum = t;
        }
        return sum;
    };
    double mean = kahan_sum(returns, [](double x) { return x; }) / static_cast<double>(trials);
    McReport rep;
    rep.mean = mean;
    rep.trials = trials;
    rep.horizon = horizon;
    rep.seed = seed;
    rep.truncation_bound = std::pow(inst.discount, horizon) * inst.max_abs_reward() /
                           (1.0 - inst.discount);
    if (trials > 1) {
        double ss = kahan_sum(returns, [&](double x) { return (x - mean) * (x - mean); });
        rep.std_error = std::sqrt(ss / static_cast<double>(trials - 1)) /
                        std::sqrt(static_cast<double>(trials));
    }
    return rep;
}

} // namespace adamdp
