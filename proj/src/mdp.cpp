#include "adamdp/mdp.hpp"

#include "vi_core.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace adamdp {

namespace {

constexpr double kStochasticTol = 1e-9;

bool finite(double x) { return std::isfinite(x); }

} // namespace

std::vector<double> MdpInstance::expected_rewards() const {
    std::vector<double> out(static_cast<size_t>(num_states) * num_actions, 0.0);
    for (int s = 0; s < num_states; ++s)
        for (int a = 0; a < num_actions; ++a) {
            double acc = 0.0;
            for (int t = 0; t < num_states; ++t) acc += p(s, a, t) * r(s, a, t);
            out[static_cast<size_t>(s) * num_actions + a] = acc;
        }
    return out;
}

double MdpInstance::max_abs_reward() const {
    double m = 0.0;
    for (double x : rewards) m = std::max(m, std::abs(x));
    return m;
}

StationaryPolicy StationaryPolicy::deterministic(int states, int actions,
                                                 const std::vector<int>& action_per_state) {
    if (static_cast<int>(action_per_state.size()) != states)
        throw std::invalid_argument("deterministic policy needs one action per state");
    StationaryPolicy pi(states, actions);
    for (int s = 0; s < states; ++s) {
        int a = action_per_state[s];
        if (a < 0 || a >= actions) throw std::invalid_argument("action index out of range");
        pi.prob(s, a) = 1.0;
    }
    return pi;
}

bool StationaryPolicy::is_deterministic(double tol) const {
    for (int s = 0; s < num_states; ++s) {
        bool has_unit = false;
        for (int a = 0; a < num_actions; ++a) {
            double x = prob(s, a);
            if (std::abs(x - 1.0) <= tol) has_unit = true;
            else if (std::abs(x) > tol) return false;
        }
        if (!has_unit) return false;
    }
    return true;
}

int StationaryPolicy::action_at(int s) const {
    int best = 0;
    for (int a = 1; a < num_actions; ++a)
        if (prob(s, a) > prob(s, best)) best = a;
    return best;
}

std::vector<Violation> validate_instance(const MdpInstance& inst) {
    std::vector<Violation> out;
    if (inst.num_states <= 0 || inst.num_actions <= 0) {
        out.push_back({"state/action counts must be positive", -1, -1, 0.0});
        return out;
    }
    size_t n = static_cast<size_t>(inst.num_states) * inst.num_actions * inst.num_states;
    if (inst.transitions.size() != n || inst.rewards.size() != n ||
        inst.initial_dist.size() != static_cast<size_t>(inst.num_states)) {
        out.push_back({"tensor sizes do not match state/action counts", -1, -1, 0.0});
        return out;
    }
    if (!(inst.discount > 0.0 && inst.discount < 1.0))
        out.push_back({"discount not in (0,1)", -1, -1, inst.discount});
    for (int s = 0; s < inst.num_states; ++s)
        for (int a = 0; a < inst.num_actions; ++a) {
            double sum = 0.0;
            bool all_finite = true;
            for (int t = 0; t < inst.num_states; ++t) {
                double x = inst.p(s, a, t);
                if (!finite(x)) all_finite = false;
                if (finite(x) && x < -kStochasticTol)
                    out.push_back({"negative transition probability", s, a, x});
                sum += x;
            }
            if (!all_finite)
                out.push_back({"non-finite transition probabilities (unfilled template?)", s, a,
                               std::numeric_limits<double>::quiet_NaN()});
            else if (std::abs(sum - 1.0) > kStochasticTol)
                out.push_back({"transition row does not sum to 1", s, a, sum - 1.0});
            for (int t = 0; t < inst.num_states; ++t)
                if (!finite(inst.r(s, a, t)))
                    out.push_back({"non-finite reward", s, a, 0.0});
        }
    double p0sum = 0.0;
    for (int s = 0; s < inst.num_states; ++s) {
        double x = inst.initial_dist[s];
        if (!finite(x) || x < -kStochasticTol)
            out.push_back({"invalid initial distribution entry", s, -1, x});
        if (finite(x)) p0sum += x;
    }
    if (std::abs(p0sum - 1.0) > kStochasticTol)
        out.push_back({"initial distribution does not sum to 1", -1, -1, p0sum - 1.0});
    return out;
}

std::vector<Violation> validate_policy(const MdpInstance& inst, const StationaryPolicy& pi) {
    std::vector<Violation> out;
    if (pi.num_states != inst.num_states || pi.num_actions != inst.num_actions) {
        out.push_back({"policy dimensions do not match instance", -1, -1, 0.0});
        return out;
    }
    for (int s = 0; s < pi.num_states; ++s) {
        double sum = 0.0;
        for (int a = 0; a < pi.num_actions; ++a) {
            double x = pi.prob(s, a);
            if (!finite(x) || x < -kStochasticTol)
                out.push_back({"invalid policy probability", s, a, x});
            sum += x;
        }
        if (std::abs(sum - 1.0) > kStochasticTol)
            out.push_back({"policy row does not sum to 1", s, -1, sum - 1.0});
    }
    return out;
}

namespace {

[[noreturn]] void throw_violations(const char* label, const std::vector<Violation>& vs) {
    std::ostringstream msg;
    msg << label << ":";
    for (const auto& v : vs) {
        msg << " [" << v.what;
        if (v.state >= 0) msg << " s=" << v.state;
        if (v.action >= 0) msg << " a=" << v.action;
        msg << "]";
    }
    throw std::invalid_argument(msg.str());
}

} // namespace

void require_valid(const MdpInstance& inst) {
    auto vs = validate_instance(inst);
    if (!vs.empty()) throw_violations("invalid MDP instance", vs);
}

void require_compatible(const MdpInstance& inst, const StationaryPolicy& pi) {
    auto vs = validate_policy(inst, pi);
    if (!vs.empty()) throw_violations("invalid policy", vs);
}

namespace {

// Policy-induced chain P_pi and one-step rewards r_pi.
void induced_chain(const MdpInstance& inst, const StationaryPolicy& pi,
                   Eigen::MatrixXd& P, Eigen::VectorXd& r) {
    int S = inst.num_states, A = inst.num_actions;
    P.setZero(S, S);
    r.setZero(S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double w = pi.prob(s, a);
            if (w == 0.0) continue;
            for (int t = 0; t < S; ++t) {
                double pr = inst.p(s, a, t);
                P(s, t) += w * pr;
                r(s) += w * pr * inst.r(s, a, t);
            }
        }
}

} // namespace

PolicyEvaluation evaluate_policy(const MdpInstance& inst, const StationaryPolicy& pi) {
    require_compatible(inst, pi);
    int S = inst.num_states;
    Eigen::MatrixXd P;
    Eigen::VectorXd r;
    induced_chain(inst, pi, P, r);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(S, S) - inst.discount * P;
    Eigen::VectorXd v = A.partialPivLu().solve(r);
    PolicyEvaluation out;
    out.value.values.assign(v.data(), v.data() + S);
    out.ret = 0.0;
    for (int s = 0; s < S; ++s) out.ret += inst.initial_dist[s] * out.value.values[s];
    return out;
}

PolicyEvaluation evaluate_policy_iterative(const MdpInstance& inst, const StationaryPolicy& pi,
                                           double residual_tol) {
    require_compatible(inst, pi);
    int S = inst.num_states;
    Eigen::MatrixXd P;
    Eigen::VectorXd r;
    induced_chain(inst, pi, P, r);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(S);
    const int max_iter = 10'000'000;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd next = r + inst.discount * (P * v);
        double res = (next - v).lpNorm<Eigen::Infinity>();
        v = next;
        if (res <= residual_tol) break;
        if (it + 1 == max_iter) throw std::runtime_error("policy evaluation did not converge");
    }
    PolicyEvaluation out;
    out.value.values.assign(v.data(), v.data() + S);
    out.ret = 0.0;
    for (int s = 0; s < S; ++s) out.ret += inst.initial_dist[s] * out.value.values[s];
    return out;
}

SolveResult solve_nominal(const MdpInstance& inst, double tol) {
    require_valid(inst);
    // Uniform placeholder baseline; with full adherence the mixed operator is
    // the classical Bellman operator and the baseline term drops out.
    StationaryPolicy uniform(inst.num_states, inst.num_actions);
    for (double& x : uniform.probs) x = 1.0 / inst.num_actions;
    auto vi = detail::value_iterate(inst, uniform, [](int) { return 1.0; }, tol);
    SolveResult out;
    out.recommendation = vi.greedy;
    out.effective = vi.greedy;
    auto eval = evaluate_policy(inst, vi.greedy);
    out.value = std::move(eval.value);
    out.ret = eval.ret;
    out.iterations = vi.iterations;
    out.residual = vi.residual;
    return out;
}

} // namespace adamdp
