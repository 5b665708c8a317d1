// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include "adamdp/adherence.hpp"
#include "adamdp/adversarial.hpp"
#include "adamdp/analysis.hpp"
#include "adamdp/constrained.hpp"
#include "adamdp/instances.hpp"
#include "adamdp/robust.hpp"
#include "helpers.hpp"
#include "lp_parse.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace adamdp;
using namespace testutil;

namespace {

struct Harness {
    int failures = 0;

    void run(int number, const std::string& label, double time_limit_s,
             const std::function<bool(std::string&)>& body) {
        std::string detail;
        bool ok = false;
        double secs = 0.0;
        try {
            auto t0 = std::chrono::steady_clock::now();
            ok = body(detail);
            secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (time_limit_s > 0.0 && secs > time_limit_s) {
                ok = false;
                detail += " [exceeded " + std::to_string(time_limit_s) + "s]";
            }
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        std::printf("%s criterion %2d: %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", number,
                    label.c_str(), secs, detail.empty() ? "" : " -- ", detail.c_str());
        if (!ok) ++failures;
    }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::vector<int> support_states(const MdpInstance& inst, const StationaryPolicy& pi) {
    const int S = inst.num_states;
    std::vector<double> mu = inst.initial_dist, nxt(S, 0.0);
    std::vector<double> total = mu;
    for (int step = 0; step < 400; ++step) {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (int s = 0; s < S; ++s) {
            if (mu[s] == 0.0) continue;
            for (int a = 0; a < inst.num_actions; ++a) {
                double w = pi.prob(s, a);
                if (w == 0.0) continue;
                for (int t = 0; t < S; ++t) nxt[t] += mu[s] * w * inst.p(s, a, t);
            }
        }
        mu = nxt;
        for (int s = 0; s < S; ++s) total[s] += mu[s];
    }
    std::vector<int> out;
    for (int s = 0; s < S; ++s)
        if (total[s] > 1e-9) out.push_back(s);
    return out;
}

} // namespace

int main() {
    Harness h;

    h.run(1, "toy closed-form returns", 1.0, [](std::string& d) {
        auto b = toy_counterexample(0.5, -1);
        bool ok = true;
        double rb = evaluate_policy(b.instance, b.baselines.at("base")).ret;
        double ra = evaluate_policy(b.instance, b.baselines.at("alg")).ret;
        ok &= near(rb, 0.5, 1e-8) && near(ra, 0.55, 1e-8);
        Rng rng(2024);
        for (int k = 0; k < 20 && ok; ++k) {
            double th = rng.next_double();
            auto eff = effective_policy(b.baselines.at("alg"), b.baselines.at("base"),
                                        AdherenceSpec::scalar(th));
            double want = 0.5 + th * (th - 0.95);
            ok &= near(evaluate_policy(b.instance, eff).ret, want, 1e-8);
        }
        if (!ok) d = "closed-form mismatch";
        return ok;
    });

    h.run(2, "breakpoint recovery on the toy instance", 5.0, [](std::string& d) {
        auto b = toy_counterexample(0.5, -1);
        const auto& base = b.baselines.at("base");
        auto sweep = theta_sweep(b.instance, base, 101, 1e-6);
        if (sweep.breakpoints.size() != 1) {
            d = "expected exactly one breakpoint, got " + std::to_string(sweep.breakpoints.size());
            return false;
        }
        if (!near(sweep.breakpoints[0], 0.9, 1e-5)) {
            d = "breakpoint at " + std::to_string(sweep.breakpoints[0]);
            return false;
        }
        bool ok = sweep.segments.size() == 2;
        // top segment: the nominal optimum 1->2, 2->4, 3->4
        auto nominal = solve_nominal(b.instance).recommendation;
        ok &= same_policy(sweep.segments[1].recommendation, nominal);
        ok &= nominal.action_at(0) == 0 && nominal.action_at(1) == 0 && nominal.action_at(2) == 0;
        // bottom segment: effectively the baseline (same actions wherever the
        // baseline walks, and the baseline's return)
        const auto& low = sweep.segments[0].recommendation;
        for (int s : support_states(b.instance, base)) ok &= low.action_at(s) == base.action_at(s);
        for (size_t i = 0; i < sweep.grid.size(); ++i)
            if (sweep.segment_ids[i] == 0) ok &= near(sweep.returns_opt[i], 0.5, 1e-8);
        if (!ok) d = "segment policies not as published";
        return ok;
    });

    h.run(3, "complementarity regime", 5.0, [](std::string& d) {
        auto b = toy_counterexample(0.5, 1);
        const auto& base = b.baselines.at("base");
        const auto& alg = b.baselines.at("alg");
        double best = -1e100;
        bool quad_ok = true;
        for (int i = 0; i <= 100; ++i) {
            double th = i / 100.0;
            auto eff = effective_policy(alg, base, AdherenceSpec::scalar(th));
            double ret = evaluate_policy(b.instance, eff).ret;
            quad_ok &= near(ret, toy_mix_return(0.5, 1, th), 1e-8);
            best = std::max(best, ret);
        }
        bool ok = quad_ok && best > std::max(0.55, 0.5) + 1e-6;
        if (!quad_ok) d = "curve deviates from the quadratic";
        else if (!ok) d = "no grid point beats both policies";
        return ok;
    });

    h.run(4, "surrogate equivalence", 30.0, [](std::string& d) {
        Rng rng(4);
        for (int k = 0; k < 50; ++k) {
            int S = 2 + static_cast<int>(rng.next_u64() % 5); // 2..6
            int A = 2 + static_cast<int>(rng.next_u64() % 2); // 2..3
            auto inst = random_instance(S, A, 1000 + k);
            auto base = random_policy(S, A, 2000 + k);
            for (double th : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                auto spec = AdherenceSpec::scalar(th);
                auto direct = solve_adamdp(inst, base, spec);
                auto via = solve_nominal(build_surrogate(inst, base, spec));
                if (!near(direct.ret, via.ret, 1e-8)) {
                    d = "returns differ at theta=" + std::to_string(th);
                    return false;
                }
                // the recommendation is degenerate at theta=0 (every policy is
                // optimal); there the effective policies must coincide instead
                bool agree = th > 0.0
                                 ? same_policy(direct.recommendation, via.recommendation)
                                 : same_policy(effective_policy(direct.recommendation, base, spec),
                                               effective_policy(via.recommendation, base, spec));
                if (!agree) {
                    d = "recommendations differ at theta=" + std::to_string(th);
                    return false;
                }
            }
        }
        return true;
    });

    h.run(5, "brute-force optimality", 30.0, [](std::string& d) {
        Rng rng(5);
        for (int k = 0; k < 20; ++k) {
            auto inst = random_instance(5, 2, 3000 + k);
            auto base = random_policy(5, 2, 4000 + k);
            double th = rng.next_double();
            auto spec = AdherenceSpec::scalar(th);
            double solved = solve_adamdp(inst, base, spec).ret;
            double best = -1e100;
            for_each_deterministic(5, 2, [&](const std::vector<int>& acts) {
                auto pi = StationaryPolicy::deterministic(5, 2, acts);
                best = std::max(best,
                                evaluate_policy(inst, effective_policy(pi, base, spec)).ret);
            });
            if (!near(solved, best, 1e-8)) {
                d = "solver missed the enumerated optimum";
                return false;
            }
        }
        return true;
    });

    h.run(6, "random adherence simulation", 10.0, [](std::string& d) {
        auto b = toy_counterexample(0.5, -1);
        const auto& base = b.baselines.at("base");
        const auto& alg = b.baselines.at("alg");
        auto bern = simulate_random_adherence(b.instance, alg, base,
                                              AdherenceDistribution::Bernoulli, 0.5, 50, 100000,
                                              7);
        auto unif = simulate_random_adherence(b.instance, alg, base,
                                              AdherenceDistribution::UniformMeanTheta, 0.5, 50,
                                              100000, 8);
        bool ok = std::abs(bern.mean - 0.275) <= 3.0 * bern.std_error + 1e-4 &&
                  std::abs(unif.mean - 0.275) <= 3.0 * unif.std_error + 1e-4;
        if (!ok)
            d = "means " + std::to_string(bern.mean) + ", " + std::to_string(unif.mean) +
                " vs 0.275";
        return ok;
    });

    h.run(7, "adversarial equivalences", 60.0, [](std::string& d) {
        auto b = toy_counterexample(0.5, -1);
        const auto& base = b.baselines.at("base");
        for (double th : {0.0, 0.5, 0.95, 1.0}) {
            auto rep = check_saddle(b.instance, base, th);
            double resolution = rep.grid_points > 1 ? (1.0 - th) / (rep.grid_points - 1) : 0.0;
            double slack = 1e-6 + resolution;
            bool ok = rep.max_u_deviation <= 1e-6 &&
                      near(rep.unconstrained_return, rep.adamdp_return, slack) &&
                      near(rep.time_invariant_return, rep.adamdp_return, slack) &&
                      near(rep.scalar_max_min, rep.adamdp_return, slack) &&
                      near(rep.scalar_min_max, rep.adamdp_return, slack);
            if (!ok) {
                d = "mismatch at theta=" + std::to_string(th);
                return false;
            }
        }
        return true;
    });

    h.run(8, "monotonicity of the optimal return", 60.0, [](std::string& d) {
        for (int k = 0; k < 20; ++k) {
            auto inst = random_instance(4, 2, 5000 + k);
            auto base = random_policy(4, 2, 6000 + k);
            double base_ret = evaluate_policy(inst, base).ret;
            double prev = -1e100;
            for (int i = 0; i <= 100; ++i) {
                double th = i / 100.0;
                double ret = solve_adamdp(inst, base, AdherenceSpec::scalar(th)).ret;
                if (ret < prev - 1e-9) {
                    d = "curve decreased at theta=" + std::to_string(th);
                    return false;
                }
                if (i == 0 && !near(ret, base_ret, 1e-10)) {
                    d = "R at zero adherence is not the baseline return";
                    return false;
                }
                prev = ret;
            }
        }
        return true;
    });

    h.run(9, "worst-case instance family", 5.0, [](std::string& d) {
        auto fam = worst_case_family(10.0, 0.5);
        const auto& base = fam.bundle.baselines.at("base");
        const auto& alg = fam.bundle.baselines.at("alg");
        double measured =
            evaluate_policy(fam.bundle.instance, base).ret -
            evaluate_policy(fam.bundle.instance,
                            effective_policy(alg, base, AdherenceSpec::scalar(0.5)))
                .ret;
        bool ok = measured >= 10.0 && near(measured, fam.gap, 1e-9 * (1.0 + measured));
        if (!ok) d = "measured gap " + std::to_string(measured);
        return ok;
    });

    h.run(10, "suboptimality bound", 30.0, [](std::string& d) {
        Rng rng(10);
        for (int k = 0; k < 50; ++k) {
            auto inst = random_instance(4, 2, 7000 + k);
            for (double& r : inst.rewards) r = 0.5 * (r + 1.0); // the bound's sound regime
            auto base = random_policy(4, 2, 8000 + k);
            auto alg = random_deterministic(4, 2, 9000 + k);
            double th = rng.next_double();
            auto res = suboptimality_bound(inst, base, alg, th);
            if (res.actual > res.bound + 1e-8) {
                d = "bound violated";
                return false;
            }
            auto rec = solve_adamdp(inst, base, AdherenceSpec::scalar(th)).recommendation;
            bool distinct = !same_policy(rec, alg);
            if (th > 0.0 && distinct && res.bound == 0.0) {
                d = "bound vanished away from the degenerate cases";
                return false;
            }
            auto at_zero = suboptimality_bound(inst, base, alg, 0.0);
            auto at_opt = suboptimality_bound(inst, base, rec, th);
            if (at_zero.bound != 0.0 || at_opt.bound != 0.0) {
                d = "bound not exactly zero in a degenerate case";
                return false;
            }
        }
        return true;
    });

    h.run(11, "cardinality-constrained adversary", 60.0, [](std::string& d) {
        for (int k = 0; k < 10; ++k) {
            auto inst = random_instance(4, 2, 11000 + k);
            auto alg = random_deterministic(4, 2, 12000 + k);
            auto base = random_policy(4, 2, 13000 + k);
            auto full = evaluate_constrained(inst, alg, base, {4});
            auto br = adversary_best_response(inst, alg, base,
                                              {AdversaryKind::TimeInvariant, 0.0});
            if (!near(full.worst_return, br.worst_return, 1e-8)) {
                d = "full budget disagrees with the box adversary";
                return false;
            }
            double prev = 1e100;
            for (int kk = 0; kk <= 4; ++kk) {
                double cur = evaluate_constrained(inst, alg, base, {kk}).worst_return;
                if (cur > prev + 1e-12) {
                    d = "worst return increased with the budget";
                    return false;
                }
                prev = cur;
            }
            std::ostringstream os;
            export_mip(inst, alg, base, {2}, os);
            std::istringstream is(os.str());
            auto lp = parse_lp(is); // throws on grammar violations
            if (lp.constraints.size() != 4 * 5 + 1 || lp.binaries.size() != 4) {
                d = "model shape off";
                return false;
            }
        }
        return true;
    });

    h.run(12, "robust adherence interval", 30.0, [](std::string& d) {
        auto b = toy_counterexample(0.5, -1);
        const auto& base = b.baselines.at("base");
        auto rob = robust_theta_solve(b.instance, base, {0.5, 1.0});
        double resolution = 0.5 / (rob.grid_points - 1);
        bool ok = near(rob.solution.ret, 0.5, 1e-8) &&
                  near(rob.certificate_max_min, rob.solution.ret, 1e-6 + resolution);
        if (!ok) {
            d = "interval [0.5,1] value " + std::to_string(rob.solution.ret);
            return false;
        }
        auto single = robust_theta_solve(b.instance, base, {0.7, 0.7});
        auto plain = solve_adamdp(b.instance, base, AdherenceSpec::scalar(0.7));
        ok = single.solution.ret == plain.ret &&
             same_policy(single.solution.recommendation, plain.recommendation);
        if (!ok) d = "singleton interval deviates from the plain solve";
        return ok;
    });

    h.run(13, "robust baseline ambiguity", 60.0, [](std::string& d) {
        Rng rng(13);
        for (int k = 0; k < 20; ++k) {
            auto inst = random_instance(4, 2, 14000 + k);
            auto base = random_policy(4, 2, 15000 + k);
            double th = rng.next_double();
            BaselineAmbiguity g;
            g.num_states = 4;
            g.num_actions = 2;
            g.vertices.resize(4);
            for (int s = 0; s < 4; ++s)
                g.vertices[s].push_back({base.prob(s, 0), base.prob(s, 1)});
            auto rob = robust_baseline_solve(inst, g, th);
            auto plain = solve_adamdp(inst, base, AdherenceSpec::scalar(th));
            if (!near(rob.ret, plain.ret, 1e-8)) {
                d = "singleton ambiguity deviates at theta=" + std::to_string(th);
                return false;
            }
        }
        for (int k = 0; k < 10; ++k) {
            auto inst = random_instance(3, 2, 16000 + k);
            auto base = random_policy(3, 2, 17000 + k);
            BaselineAmbiguity g;
            g.num_states = 3;
            g.num_actions = 2;
            g.vertices.resize(3);
            for (int s = 0; s < 3; ++s)
                g.vertices[s].push_back({base.prob(s, 0), base.prob(s, 1)});
            double prev = robust_baseline_solve(inst, g, 0.5).ret;
            for (int extra = 0; extra < 3; ++extra) {
                auto more = random_policy(3, 2, 18000 + 10 * k + extra);
                for (int s = 0; s < 3; ++s)
                    g.vertices[s].push_back({more.prob(s, 0), more.prob(s, 1)});
                double cur = robust_baseline_solve(inst, g, 0.5).ret;
                if (cur > prev + 1e-9) {
                    d = "value increased when the ambiguity grew";
                    return false;
                }
                prev = cur;
            }
        }
        return true;
    });

    h.run(14, "benchmark templates stand in for the unpublished dynamics", 5.0,
          [](std::string& d) {
              auto machine = machine_replacement_template();
              auto health = healthcare_template();
              bool ok = true;
              ok &= machine.instance.discount == 0.99 && health.instance.discount == 0.99;
              ok &= machine.instance.r(7, 0, 0) == 0.0 && machine.instance.r(8, 0, 0) == 18.0 &&
                    machine.instance.r(9, 0, 0) == 10.0 && machine.instance.r(0, 0, 0) == 20.0;
              ok &= health.instance.r(0, 0, 0) == 20.0 && health.instance.r(0, 1, 0) == 15.0 &&
                    health.instance.r(0, 2, 0) == 10.0 && health.instance.r(5, 0, 5) == 0.0;
              for (auto* b : {&machine, &health}) {
                  auto vs = validate_bundle(*b);
                  ok &= !vs.empty() &&
                        vs.front().what.find("REQUIRED-EXTERNAL") != std::string::npos;
              }
              if (!ok) {
                  d = "template contents drifted";
                  return false;
              }
              // stretch: a user-completed machine instance, when present, must
              // reproduce the published nominal action split
              std::ifstream completed("instances/machine_replacement_completed.json");
              if (completed.good()) {
                  auto bund = load_bundle("instances/machine_replacement_completed.json");
                  auto nominal = solve_nominal(bund.instance).recommendation;
                  for (int s : {0, 1, 2, 3}) ok &= nominal.action_at(s) == 1;  // wait
                  ok &= nominal.action_at(9) == 1;                             // wait in R2
                  for (int s : {4, 5, 6, 7}) ok &= nominal.action_at(s) == 0;  // repair
                  ok &= nominal.action_at(8) == 0;                             // repair in R1
                  if (!ok) d = "completed instance does not reproduce the action split";
              }
              return ok;
          });

    if (h.failures == 0) std::printf("all criteria passed\n");
    else std::printf("%d criterion(s) failed\n", h.failures);
    return h.failures == 0 ? 0 : 1;
}
