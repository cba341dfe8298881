#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ricker/equilibrium.hpp"
#include "ricker/gamma_kernels.hpp"
#include "ricker/moment_map.hpp"
#include "test_util.hpp"

using namespace ricker;
using testutil::rel_err;
using testutil::ulps_between;

TEST_SUITE("moment_map") {

TEST_CASE("step regression against a high-precision anchor") {
    // Reference computed with 50-digit arithmetic for (mu,s)=(0.5,0.02),
    // (r,v)=(0.5,1.05), then one further step.
    const auto o1 = step({0.5, 0.02}, {0.5, 1.05});
    REQUIRE(!o1.breakdown());
    CHECK(rel_err(o1.next->mu, 0.6309790305668271) <= 1e-14);
    CHECK(rel_err(o1.next->s, 0.038244746908089366) <= 1e-13);
    CHECK(rel_err(o1.raw_second_moment, 0.4363792839231423) <= 1e-13);

    const auto o2 = step(*o1.next, {0.5, 1.05});
    REQUIRE(!o2.breakdown());
    CHECK(rel_err(o2.next->mu, 0.7399728806407444) <= 1e-13);
    CHECK(rel_err(o2.next->s, 0.052490961267928602) <= 1e-13);
}

TEST_CASE("reference equilibria are fixed points at display precision") {
    const auto a = step({0.602, 0.649}, {1.5, 2.0});
    REQUIRE(!a.breakdown());
    CHECK(rel_err(a.next->mu, 0.602) <= 1e-3);
    CHECK(rel_err(a.next->s, 0.649) <= 1e-3);

    const auto b = step({1.159, 0.88}, {3.0, 1.05});
    REQUIRE(!b.breakdown());
    CHECK(rel_err(b.next->mu, 1.159) <= 1e-2);
    CHECK(rel_err(b.next->s, 0.88) <= 1e-2);
}

TEST_CASE("iteration settles to stationarity") {
    const auto t = iterate({0.5, 0.02}, {1.39, 1.10}, 2000);
    CHECK(t.reason == TerminationReason::Completed);
    REQUIRE(t.states.size() == 2001);
    const auto& a = t.states[t.states.size() - 2];
    const auto& b = t.states.back();
    CHECK(rel_err(b.mu, a.mu) < 1e-10);
    CHECK(rel_err(b.s, a.s) < 1e-10);
    for (const auto& st : t.states) {
        CHECK(st.mu > 0);
        CHECK(st.s > 0);
    }
}

TEST_CASE("trajectory started at the solved equilibrium stays constant") {
    const auto eq = solve_equilibrium({1.5, 2.0});
    REQUIRE(eq.feasible);
    const MomentState star{*eq.mu_star, *eq.s_star};
    const auto t = iterate(star, {1.5, 2.0}, 500);
    CHECK(t.reason == TerminationReason::Completed);
    for (const auto& st : t.states) {
        CHECK(rel_err(st.mu, star.mu) <= 1e-3);
        CHECK(rel_err(st.s, star.s) <= 1e-3);
    }
}

TEST_CASE("zero steps yields only the initial state") {
    const auto t = iterate({0.7, 0.1}, {1.0, 1.5}, 0);
    CHECK(t.reason == TerminationReason::Completed);
    REQUIRE(t.states.size() == 1);
    CHECK(t.states[0].mu == 0.7);
    CHECK(t.states[0].s == 0.1);
}

TEST_CASE("classical skeleton map") {
    for (const double r : {0.3, 1.7, 2.9})
        CHECK(classical_ricker_step(1.0, r) == 1.0);
    CHECK(classical_ricker_step(0.5, 2.0) ==
          doctest::Approx(0.5 * std::exp(1.0)).epsilon(1e-15));
    double x = 0.5;
    for (int n = 0; n < 200; ++n) x = classical_ricker_step(x, 1.5);
    CHECK(std::fabs(x - 1.0) < 1e-9);
    CHECK_THROWS_AS(classical_ricker_step(-0.5, 1.0), std::domain_error);
}

TEST_CASE("breakdown by cancellation is an outcome, not an exception") {
    // One ulp of noise above v=1 with a nearly deterministic state: the
    // second moment and squared mean collide at rounding level.
    const double v = 1.0 + 2.220446049250313e-16;
    const auto o = step({2.0, 1e-10}, {0.5, v});
    CHECK(o.breakdown());
    CHECK(!o.next.has_value());
    CHECK(o.raw_mu > 0);
    CHECK(o.raw_s <= 0);
}

TEST_CASE("breakdown by mean underflow terminates a long trajectory") {
    // Strong noise at low growth drives mu toward zero until s' <= 0.
    const auto t = iterate({0.5, 0.02}, {0.5, 5.0}, 3000);
    CHECK(t.reason == TerminationReason::Breakdown);
    REQUIRE(t.fault.has_value());
    CHECK(t.fault->breakdown());
    CHECK(std::isfinite(t.fault->raw_mu));
    CHECK(std::isfinite(t.fault->raw_s));
    CHECK(t.states.size() > 1000);
    CHECK(t.states.size() < 1500);
    for (const auto& st : t.states) {
        CHECK(st.mu > 0);
        CHECK(st.s > 0);
    }
}

TEST_CASE("non-finite intermediates raise numeric_failure with the inputs") {
    const MomentState bad{1e200, 1e-300};
    const Params p{0.5, 1.05};
    CHECK_THROWS_AS(step(bad, p), numeric_failure);
    try {
        step(bad, p);
    } catch (const numeric_failure& e) {
        CHECK(e.state.mu == 1e200);
        CHECK(e.state.s == 1e-300);
        CHECK(e.params.r == 0.5);
    }
    const auto t = iterate(bad, p, 10);
    CHECK(t.reason == TerminationReason::NumericFailure);
    CHECK(t.states.size() == 1);
}

TEST_CASE("parameter and state validation") {
    CHECK_THROWS_AS(step({1.0, 0.1}, {-0.5, 2.0}), std::domain_error);
    CHECK_THROWS_AS(step({1.0, 0.1}, {0.5, 1.0}), std::domain_error);
    CHECK_THROWS_AS(step({0.0, 0.1}, {0.5, 2.0}), std::domain_error);
    CHECK_THROWS_AS(step({1.0, 0.0}, {0.5, 2.0}), std::domain_error);
}

TEST_CASE("deterministic limit: closed map tracks the classical orbit") {
    const auto g = deterministic_limit_gap(0.5, 1.0, 1e-9, 1e-8, 100);
    CHECK(g.reason == TerminationReason::Completed);
    CHECK(g.steps_run == 100);
    CHECK(g.max_gap < 1e-3);

    // Tightening both epsilons can only shrink the gap.
    const double ladder[] = {1e-6, 1e-8, 1e-10};
    double prev = std::numeric_limits<double>::infinity();
    for (const double e : ladder) {
        const auto gi = deterministic_limit_gap(0.5, 1.0, e, e, 100);
        CHECK(gi.reason == TerminationReason::Completed);
        CHECK(gi.max_gap <= prev);
        prev = gi.max_gap;
    }

    // x=1 is the classical fixed point, so the mean must hug 1 throughout.
    const auto fixed = deterministic_limit_gap(1.0, 1.5, 1e-9, 1e-8, 100);
    CHECK(fixed.max_gap < 1e-3);

    CHECK_THROWS_AS(deterministic_limit_gap(0.5, 1.0, 1e-3, 1e-8, 10),
                    std::domain_error);
    CHECK_THROWS_AS(deterministic_limit_gap(0.5, 1.0, 1e-9, 0.0, 10),
                    std::domain_error);
}

TEST_CASE("variance terms agree at v=1 in the small-variance regime") {
    const double mu = 0.7, r = 1.3;
    for (const double s : {1e-8, 1e-9, 1e-10}) {
        const double m2_term =
            std::exp(2.0 * r) * laplace_moment(mu, s, 2.0 * r, 2);
        const double mean_term = std::exp(r) * laplace_moment(mu, s, r, 1);
        CHECK(std::fabs(m2_term - mean_term * mean_term) <=
              1e-6 * mean_term * mean_term);
    }
}

TEST_CASE("step delegates to the transform kernels") {
    // The same quantities written with pow instead of exp/log1p. The two
    // forms take different rounding paths (a handful of ulps each), so the
    // bound is a few tens of ulps: loose enough for the reformulation, far
    // too tight for any formula mix-up.
    const MomentState states[] = {{0.5, 0.02}, {1.0, 0.5}, {2.0, 1.0}, {0.8, 0.1}};
    const double rs[] = {0.5, 1.5, 3.0};
    const double v = 1.05;
    const double eps = std::numeric_limits<double>::epsilon();
    for (const auto st : states) {
        for (const double r : rs) {
            const auto o = step(st, {r, v});
            const double k = st.mu * st.mu / st.s;
            const double theta = st.s / st.mu;
            const double mu1 = std::exp(r) * st.mu /
                               std::pow(1.0 + r * theta, k + 1.0);
            const double m2 = v * std::exp(2.0 * r) * (st.mu * st.mu + st.s) /
                              std::pow(1.0 + 2.0 * r * theta, k + 2.0);
            CHECK(ulps_between(o.raw_mu, mu1) <= 32);
            CHECK(ulps_between(o.raw_second_moment, m2) <= 32);
            // s' subtracts two close numbers, so its tolerance is measured
            // against the terms being subtracted rather than the difference.
            CHECK(std::fabs(o.raw_s - (m2 - mu1 * mu1)) <=
                  16.0 * eps * (m2 + mu1 * mu1));
        }
    }
}

}  // TEST_SUITE
