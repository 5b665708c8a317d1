#include "adamdp/constrained.hpp"

#include "adamdp/adherence.hpp"
#include "lp_writer.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace adamdp {

namespace {

long feasible_subsets(int n, int k) {
    // sum_{i<=k} C(n,i), saturating above the guard
    const long guard = 2'000'000;
    long total = 0, c = 1;
    for (int i = 0; i <= std::min(n, k); ++i) {
        total += c;
        if (total > guard) return guard + 1;
        c = c * (n - i) / (i + 1);
    }
    return total;
}

} // namespace

ConstrainedResult evaluate_constrained(const MdpInstance& inst, const StationaryPolicy& alg,
                                       const StationaryPolicy& base, CardinalityBudget budget) {
    require_valid(inst);
    require_compatible(inst, alg);
    require_compatible(inst, base);
    const int S = inst.num_states;
    if (budget.k < 0 || budget.k > S) throw std::invalid_argument("budget k must be in [0, |S|]");
    if (feasible_subsets(S, budget.k) > 1'000'000)
        throw GuardExceeded("subset enumeration guard exceeded (> 1e6 patterns)");

    ConstrainedResult out;
    out.worst_return = std::numeric_limits<double>::infinity();
    std::vector<int> u(S, 0);

    // Depth-first in lexicographic order of (u_0, ..., u_{S-1}); strict
    // improvement keeps the lexicographically smallest minimizer.
    auto visit = [&](auto&& self, int pos, int used) -> void {
        if (pos == S) {
            ++out.subsets_evaluated;
            StationaryPolicy eff(S, inst.num_actions);
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < inst.num_actions; ++a)
                    eff.prob(s, a) = u[s] ? alg.prob(s, a) : base.prob(s, a);
            double ret = evaluate_policy(inst, eff).ret;
            if (ret < out.worst_return) {
                out.worst_return = ret;
                out.worst_u = u;
            }
            return;
        }
        u[pos] = 0;
        self(self, pos + 1, used);
        if (used < budget.k) {
            u[pos] = 1;
            self(self, pos + 1, used + 1);
            u[pos] = 0;
        }
    };
    visit(visit, 0, 0);
    return out;
}

void export_mip(const MdpInstance& inst, const StationaryPolicy& alg,
                const StationaryPolicy& base, CardinalityBudget budget, std::ostream& sink) {
    require_valid(inst);
    require_compatible(inst, alg);
    require_compatible(inst, base);
    const int S = inst.num_states, A = inst.num_actions;
    if (budget.k < 0 || budget.k > S) throw std::invalid_argument("budget k must be in [0, |S|]");
    const double lambda = inst.discount;
    const double r_inf = inst.max_abs_reward();
    if (!std::isfinite(r_inf)) throw std::invalid_argument("rewards must be finite");
    const double big_m_lo = r_inf / (1.0 - lambda);      // lower z bound scale
    const double big_m = 2.0 * r_inf / (1.0 - lambda);   // band and upper z bound scale

    const std::vector<double> R = inst.expected_rewards();
    // Chains induced by the recommendation and the baseline, and their
    // expected one-step rewards.
    std::vector<double> chain_alg(static_cast<size_t>(S) * S, 0.0),
        chain_base(static_cast<size_t>(S) * S, 0.0);
    std::vector<double> r_alg(S, 0.0), r_base(S, 0.0);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double wa = alg.prob(s, a), wb = base.prob(s, a);
            r_alg[s] += wa * R[static_cast<size_t>(s) * A + a];
            r_base[s] += wb * R[static_cast<size_t>(s) * A + a];
            for (int t = 0; t < S; ++t) {
                chain_alg[static_cast<size_t>(s) * S + t] += wa * inst.p(s, a, t);
                chain_base[static_cast<size_t>(s) * S + t] += wb * inst.p(s, a, t);
            }
        }

    auto v = [](int s) { return "v_" + std::to_string(s); };
    auto z = [](int s) { return "z_" + std::to_string(s); };
    auto uvar = [](int s) { return "u_" + std::to_string(s); };

    sink << "\\ cardinality-constrained worst-case adherence MIP\n";
    sink << "Minimize\n obj: ";
    detail::LinExpr obj;
    for (int s = 0; s < S; ++s) obj.add(v(s), inst.initial_dist[s]);
    obj.print(sink);
    sink << "\nSubject To\n";
    for (int s = 0; s < S; ++s) {
        // v_s >= lambda z_s + r_base_s + (r_alg_s - r_base_s) u_s + lambda chain_base_s . v
        detail::LinExpr value;
        value.add(v(s), 1.0);
        value.add(z(s), -lambda);
        value.add(uvar(s), -(r_alg[s] - r_base[s]));
        for (int t = 0; t < S; ++t)
            value.add(v(t), -lambda * chain_base[static_cast<size_t>(s) * S + t]);
        detail::print_constraint(sink, "value_" + std::to_string(s), value, ">=", r_base[s]);
    }
    for (int s = 0; s < S; ++s) {
        // |z_s - (chain_alg_s - chain_base_s) . v| <= big_m (1 - u_s)
        detail::LinExpr lo, hi;
        lo.add(z(s), 1.0);
        hi.add(z(s), 1.0);
        for (int t = 0; t < S; ++t) {
            double d = chain_alg[static_cast<size_t>(s) * S + t] -
                       chain_base[static_cast<size_t>(s) * S + t];
            lo.add(v(t), -d);
            hi.add(v(t), -d);
        }
        lo.add(uvar(s), -big_m);
        hi.add(uvar(s), big_m);
        detail::print_constraint(sink, "band_lo_" + std::to_string(s), lo, ">=", -big_m);
        detail::print_constraint(sink, "band_hi_" + std::to_string(s), hi, "<=", big_m);
    }
    for (int s = 0; s < S; ++s) {
        // -big_m_lo u_s <= z_s <= big_m u_s
        detail::LinExpr lo, hi;
        lo.add(z(s), 1.0);
        lo.add(uvar(s), big_m_lo);
        hi.add(z(s), 1.0);
        hi.add(uvar(s), -big_m);
        detail::print_constraint(sink, "z_lo_" + std::to_string(s), lo, ">=", 0.0);
        detail::print_constraint(sink, "z_hi_" + std::to_string(s), hi, "<=", 0.0);
    }
    detail::LinExpr card;
    for (int s = 0; s < S; ++s) card.add(uvar(s), 1.0);
    detail::print_constraint(sink, "card", card, "<=", static_cast<double>(budget.k));
    sink << "Bounds\n";
    for (int s = 0; s < S; ++s) sink << " " << v(s) << " free\n";
    for (int s = 0; s < S; ++s) sink << " " << z(s) << " free\n";
    sink << "Binaries\n";
    for (int s = 0; s < S; ++s) sink << " " << uvar(s) << "\n";
    sink << "End\n";
    if (!sink) throw std::runtime_error("failed writing MIP model");
}

} // namespace adamdp
