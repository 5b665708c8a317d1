#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adamdp/instances.hpp"
#include "adamdp/robust.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace adamdp;
using namespace testutil;

namespace {

BaselineAmbiguity singleton_ambiguity(const StationaryPolicy& base) {
    BaselineAmbiguity g;
    g.num_states = base.num_states;
    g.num_actions = base.num_actions;
    g.vertices.resize(base.num_states);
    for (int s = 0; s < base.num_states; ++s) {
        std::vector<double> row(base.num_actions);
        for (int a = 0; a < base.num_actions; ++a) row[a] = base.prob(s, a);
        g.vertices[s].push_back(row);
    }
    return g;
}

} // namespace

TEST_CASE("degenerate interval reduces to the plain solve") {
    auto inst = random_instance(4, 2, 400);
    auto base = random_policy(4, 2, 401);
    auto sol = solve_adamdp(inst, base, AdherenceSpec::scalar(0.6));
    auto rob = robust_theta_solve(inst, base, {0.6, 0.6});
    CHECK(rob.solution.ret == sol.ret);
    CHECK(same_policy(rob.solution.recommendation, sol.recommendation));
    CHECK(rob.certificate_max_min == doctest::Approx(sol.ret).epsilon(1e-8));
}

TEST_CASE("toy interval spanning the breakpoint floors at the baseline value") {
    auto b = toy_counterexample(0.5, -1);
    auto rob = robust_theta_solve(b.instance, b.baselines.at("base"), {0.5, 1.0});
    CHECK(rob.solution.ret == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rob.certificate_max_min == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("toy interval inside the top segment floors at its lower endpoint") {
    auto b = toy_counterexample(0.5, -1);
    auto rob = robust_theta_solve(b.instance, b.baselines.at("base"), {0.95, 1.0});
    auto nominal = solve_nominal(b.instance);
    CHECK(same_policy(rob.solution.recommendation, nominal.recommendation));
    // value of mixing the nominal optimum at the interval's lower end
    CHECK(rob.solution.ret == doctest::Approx(toy_nominal_mix_return(0.5, 0.95)).epsilon(1e-9));
    CHECK(rob.certificate_max_min == doctest::Approx(rob.solution.ret).epsilon(1e-6));
}

TEST_CASE("robust value is a lower bound across the interval") {
    auto inst = random_instance(4, 2, 410);
    auto base = random_policy(4, 2, 411);
    auto rob = robust_theta_solve(inst, base, {0.3, 0.9});
    for (int i = 0; i <= 20; ++i) {
        double theta = 0.3 + 0.6 * i / 20.0;
        CHECK(rob.solution.ret <=
              solve_adamdp(inst, base, AdherenceSpec::scalar(theta)).ret + 1e-9);
    }
}

TEST_CASE("interval validation and enumeration guard") {
    auto b = toy_counterexample(0.5, -1);
    CHECK_THROWS_AS(robust_theta_solve(b.instance, b.baselines.at("base"), {0.8, 0.4}),
                    std::invalid_argument);
    auto big = random_instance(8, 8, 4);
    auto base = random_policy(8, 8, 5);
    CHECK_THROWS_AS(robust_theta_solve(big, base, {0.2, 0.8}), GuardExceeded);
}

TEST_CASE("singleton ambiguity matches the plain solve") {
    for (uint64_t seed = 420; seed < 440; ++seed) {
        auto inst = random_instance(4, 3, seed);
        auto base = random_policy(4, 3, seed + 100);
        double theta = 0.25 + 0.5 * ((seed - 420) / 20.0);
        auto plain = solve_adamdp(inst, base, AdherenceSpec::scalar(theta));
        auto rob = robust_baseline_solve(inst, singleton_ambiguity(base), theta);
        CHECK(rob.ret == doctest::Approx(plain.ret).epsilon(1e-8));
        CHECK(same_policy(rob.recommendation, plain.recommendation));
    }
}

TEST_CASE("full adherence makes the ambiguity irrelevant") {
    auto inst = random_instance(4, 2, 450);
    auto base1 = random_policy(4, 2, 451);
    auto base2 = random_policy(4, 2, 452);
    BaselineAmbiguity g = singleton_ambiguity(base1);
    auto g2 = singleton_ambiguity(base2);
    for (int s = 0; s < 4; ++s) g.vertices[s].push_back(g2.vertices[s][0]);
    auto rob = robust_baseline_solve(inst, g, 1.0);
    auto nominal = solve_nominal(inst);
    CHECK(rob.ret == doctest::Approx(nominal.ret).epsilon(1e-9));
    CHECK(same_policy(rob.recommendation, nominal.recommendation));
}

TEST_CASE("robust value never exceeds any fixed-vertex solve and can attain it") {
    auto inst = random_instance(3, 2, 460);
    BaselineAmbiguity g;
    g.num_states = 3;
    g.num_actions = 2;
    g.vertices.resize(3);
    for (int s = 0; s < 3; ++s) {
        auto v1 = random_policy(1, 2, 500 + s);
        auto v2 = random_policy(1, 2, 600 + s);
        g.vertices[s].push_back({v1.prob(0, 0), v1.prob(0, 1)});
        g.vertices[s].push_back({v2.prob(0, 0), v2.prob(0, 1)});
    }
    double theta = 0.5;
    auto rob = robust_baseline_solve(inst, g, theta);

    double corner_min = 1e100;
    for (int mask = 0; mask < 8; ++mask) {
        StationaryPolicy corner(3, 2);
        for (int s = 0; s < 3; ++s) {
            const auto& v = g.vertices[s][(mask >> s) & 1];
            for (int a = 0; a < 2; ++a) corner.prob(s, a) = v[a];
        }
        corner_min =
            std::min(corner_min, solve_adamdp(inst, corner, AdherenceSpec::scalar(theta)).ret);
    }
    CHECK(rob.ret <= corner_min + 1e-8);

    // when the extracted pair is a saddle point, the bound is attained
    auto counter = solve_adamdp(inst, rob.worst_baseline, AdherenceSpec::scalar(theta));
    if (std::abs(counter.ret - rob.ret) <= 1e-9)
        CHECK(rob.ret == doctest::Approx(corner_min).epsilon(1e-8));
}

TEST_CASE("adding vertices cannot help the decision maker") {
    auto inst = random_instance(4, 2, 470);
    auto base = random_policy(4, 2, 471);
    BaselineAmbiguity g = singleton_ambiguity(base);
    double prev = robust_baseline_solve(inst, g, 0.4).ret;
    for (uint64_t k = 0; k < 10; ++k) {
        auto extra = random_policy(4, 2, 480 + k);
        for (int s = 0; s < 4; ++s) {
            std::vector<double> row(2);
            for (int a = 0; a < 2; ++a) row[a] = extra.prob(s, a);
            g.vertices[s].push_back(row);
        }
        double cur = robust_baseline_solve(inst, g, 0.4).ret;
        CHECK(cur <= prev + 1e-9);
        prev = cur;
    }
}

TEST_CASE("ambiguity validation") {
    auto inst = random_instance(3, 2, 490);
    BaselineAmbiguity empty;
    empty.num_states = 3;
    empty.num_actions = 2;
    empty.vertices.resize(3);
    empty.vertices[0].push_back({0.5, 0.5});
    empty.vertices[1].push_back({0.5, 0.5});
    CHECK_THROWS_AS(robust_baseline_solve(inst, empty, 0.5), std::invalid_argument);
    BaselineAmbiguity bad = empty;
    bad.vertices[2].push_back({0.7, 0.6}); // not a distribution
    CHECK_THROWS_AS(robust_baseline_solve(inst, bad, 0.5), std::invalid_argument);
}
