#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "blowuplab/gronwall.hpp"
#include "blowuplab/rng.hpp"

using namespace blowuplab;
using namespace blowuplab::gronwall;

TEST_CASE("case classifier") {
    CHECK(case_classifier({1.0, 1.0, 1.0, 1.0}) == CaseTag::BetaOne);
    // 2 beta + a (1 - beta) = 2/3 + 1/2 * 2/3 = 1
    CHECK(case_classifier({0.5, 1.0, 1.0 / 3.0, 1.0}) == CaseTag::LogCritical);
    CHECK(case_classifier({2.0, 1.0, 0.5, 1.0}) == CaseTag::PowerGeneric);
}

TEST_CASE("bound examples") {
    // b = 0 collapses the integrating factor: f0 (t+1)^a
    CHECK(gronwall_bound({1.0, 0.0, 1.0, 1.0}, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    // beta = 1, a = b = f0 = 1, t = 3: f0 e^b (t+1)^a = 4e
    CHECK(gronwall_bound({1.0, 1.0, 1.0, 1.0}, 3.0) ==
          doctest::Approx(4.0 * std::exp(1.0)).epsilon(1e-14));
}

TEST_CASE("power-generic bound equals the equality-ODE solution") {
    // beta = 1/2, a = 2, b = 1, f0 = 1: 2 beta + a(1-beta) = 2 != 1
    GronwallParams p{2.0, 1.0, 0.5, 1.0};
    REQUIRE(case_classifier(p) == CaseTag::PowerGeneric);
    const double bound = gronwall_bound(p, 2.0);
    const double oracle = ode_solve_at(p, 2.0, 1e-5);
    CHECK(bound == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("log-critical bound equals the equality-ODE solution") {
    GronwallParams p{0.5, 0.7, 1.0 / 3.0, 2.0};
    REQUIRE(case_classifier(p) == CaseTag::LogCritical);
    for (double t : {0.3, 1.0, 5.0, 20.0}) {
        const double bound = gronwall_bound(p, t);
        const double oracle = ode_solve_at(p, t, 1e-4);
        CHECK(bound == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("near-critical parameters route through the generic formula") {
    // removable singularity: the generic formula at |E-1| ~ 1e-8 stays finite
    // and close to the critical formula
    const double beta = 1.0 / 3.0;
    const double a_crit = (1.0 - 2.0 * beta) / (1.0 - beta);
    GronwallParams crit{a_crit, 1.0, beta, 1.0};
    GronwallParams near_crit{a_crit + 1e-8, 1.0, beta, 1.0};
    REQUIRE(case_classifier(crit) == CaseTag::LogCritical);
    REQUIRE(case_classifier(near_crit) == CaseTag::PowerGeneric);
    for (double t : {0.5, 3.0}) {
        CHECK(gronwall_bound(near_crit, t) ==
              doctest::Approx(gronwall_bound(crit, t)).epsilon(1e-6));
    }
}

TEST_CASE("ode oracle basics") {
    // nearly-linear ODE: f' = f/(t+1), f = (t+1)
    GronwallParams p{1.0, 1e-30, 1.0, 1.0};
    for (double t : {0.5, 1.0, 4.0})
        CHECK(ode_solve_at(p, t, 1e-3) == doctest::Approx(t + 1.0).epsilon(1e-9));

    // f0 = 0 stays identically zero
    GronwallParams z{1.0, 1.0, 1.0, 0.0};
    auto traj = ode_oracle(z, 2.0, 1e-2);
    for (const auto& pt : traj) CHECK(pt.f == 0.0);

    // halved-step cross-check on a generic case
    GronwallParams g{1.5, 0.5, 0.75, 2.0};
    const double f1 = ode_solve_at(g, 3.0, 2e-3);
    const double f2 = ode_solve_at(g, 3.0, 1e-3);
    CHECK(f1 == doctest::Approx(f2).epsilon(1e-10));

    // monotone nondecreasing trajectories
    auto tr = ode_oracle(g, 5.0, 1e-2);
    for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i].f >= tr[i - 1].f);
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(gronwall_bound({1.0, 1.0, 1.5, 1.0}, 1.0), InvalidParams); // beta > 1
    CHECK_THROWS_AS(gronwall_bound({0.0, 1.0, 1.0, 1.0}, 1.0), InvalidParams); // a = 0
    CHECK_THROWS_AS(gronwall_bound({1.0, -0.1, 1.0, 1.0}, 1.0), InvalidParams);
    CHECK_THROWS_AS(gronwall_bound({1.0, 1.0, 1.0, -1.0}, 1.0), InvalidParams);
    CHECK_THROWS_AS(gronwall_bound({1.0, 1.0, 1.0, 1.0}, -0.5), InvalidParams);
    CHECK_THROWS_AS(ode_oracle({1.0, 1.0, 1.0, 1.0}, 1.0, 0.0), InvalidParams);
}

TEST_CASE("step-doubling error check throws on an oversized step") {
    GronwallParams p{5.0, 3.0, 0.5, 10.0};
    CHECK_THROWS_AS(ode_oracle(p, 40.0, 10.0, 1e-14), StepTooLarge);
}

TEST_CASE("oracle domination property") {
    Rng rng(101);
    for (int rep = 0; rep < 60; ++rep) {
        GronwallParams p;
        p.a = 0.1 + 4.9 * rng.uniform();
        p.b = 0.01 + 2.99 * rng.uniform();
        p.beta = rep % 4 == 0 ? 1.0 : 0.1 + 0.85 * rng.uniform();
        p.f0 = 10.0 * rng.uniform();
        auto traj = ode_oracle(p, 5.0, 2e-3);
        for (std::size_t i = 0; i < traj.size(); i += 50) {
            const double bound = gronwall_bound(p, traj[i].t);
            CHECK(traj[i].f <= bound * (1.0 + 1e-8));
        }
    }
}

TEST_CASE("beta = 1 slack ratio is exactly exp(b/(t+1))") {
    Rng rng(102);
    for (int rep = 0; rep < 20; ++rep) {
        GronwallParams p{0.2 + 3.0 * rng.uniform(), 0.05 + 2.0 * rng.uniform(), 1.0,
                         0.1 + 5.0 * rng.uniform()};
        for (double t : {0.1, 1.0, 7.0}) {
            const double ratio = gronwall_bound(p, t) / ode_solve_at(p, t, 1e-3);
            CHECK(ratio == doctest::Approx(std::exp(p.b / (t + 1.0))).epsilon(1e-8));
        }
    }
}

TEST_CASE("bound is nondecreasing in t, f0 and b") {
    Rng rng(103);
    for (int rep = 0; rep < 40; ++rep) {
        GronwallParams p;
        p.a = 0.1 + 4.0 * rng.uniform();
        p.b = 0.01 + 2.0 * rng.uniform();
        p.beta = rep % 3 == 0 ? 1.0 : 0.1 + 0.85 * rng.uniform();
        p.f0 = 0.1 + 8.0 * rng.uniform();
        const double t = 4.0 * rng.uniform();
        const double base = gronwall_bound(p, t);
        CHECK(gronwall_bound(p, t + 0.5) >= base * (1.0 - 1e-12));
        GronwallParams pf = p;
        pf.f0 += 0.5;
        CHECK(gronwall_bound(pf, t) >= base * (1.0 - 1e-12));
        GronwallParams pb = p;
        pb.b += 0.5;
        CHECK(gronwall_bound(pb, t) >= base * (1.0 - 1e-12));
    }
}
