#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ricker/equilibrium.hpp"
#include "ricker/moment_map.hpp"
#include "test_util.hpp"

using namespace ricker;
using testutil::log_spaced;
using testutil::rel_err;

TEST_SUITE("equilibrium") {

TEST_CASE("root function limits and reference roots") {
    CHECK(std::fabs(aux_f(1e-12, 1.5, 2.0) + std::log(2.0)) <= 1e-6);
    CHECK(std::fabs(aux_f(1.616, 1.5, 2.0)) < 1e-3);
    CHECK(std::fabs(aux_f(2.282, 3.0, 1.05)) < 1e-3);

    // The series branch below z=1e-8 must join the direct form seamlessly:
    // after removing the genuine slope F'(0+) = 2 - r across the 2e-10 gap
    // between the probes, only branch-switch noise remains.
    const double below = aux_f(0.99e-8, 1.5, 2.0);
    const double above = aux_f(1.01e-8, 1.5, 2.0);
    CHECK(std::fabs(above - below - (2.0 - 1.5) * 0.02e-8) < 1e-14);

    CHECK_THROWS_AS(aux_f(0.0, 1.5, 2.0), std::domain_error);
    CHECK_THROWS_AS(aux_f(-1.0, 1.5, 2.0), std::domain_error);
    CHECK_THROWS_AS(aux_f(1.0, 0.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(aux_f(1.0, 1.5, 1.0), std::domain_error);
}

TEST_CASE("root function derivative: limits and finite differences") {
    for (const double r : {0.5, 2.0, 5.0})
        CHECK(std::fabs(aux_f_prime(1e-10, r) - (2.0 - r)) <= 1e-5);
    for (const double r : {0.5, 2.0, 5.0})
        CHECK(std::fabs(aux_f_prime(1e6, r)) < 1e-4);

    const double v = 2.0;
    for (const double r : {0.5, 1.5}) {
        for (const double z : log_spaced(0.01, 100.0, 30)) {
            const double h = 3e-6 * z;
            const double fd =
                (aux_f(z + h, r, v) - aux_f(z - h, r, v)) / (2.0 * h);
            CHECK(rel_err(aux_f_prime(z, r), fd) <= 1e-6);
        }
    }
    CHECK_THROWS_AS(aux_f_prime(1.0, -1.0), std::domain_error);
}

TEST_CASE("feasibility threshold values") {
    CHECK(feasibility_threshold(1e-12) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(feasibility_threshold(std::log(2.0)) ==
          doctest::Approx(2.25).epsilon(1e-14));
    CHECK(std::fabs(feasibility_threshold(50.0) - 4.0) < 1e-12);
    CHECK(rel_err(feasibility_threshold(0.75), 2.333663949184371) <= 1e-14);
    CHECK(rel_err(feasibility_threshold(9.5), 3.9997005982832456) <= 1e-14);
    CHECK_THROWS_AS(feasibility_threshold(0.0), std::domain_error);
}

TEST_CASE("solver reproduces the reference equilibria") {
    const auto a = solve_equilibrium({1.5, 2.0});
    REQUIRE(a.verdict == EquilibriumVerdict::FeasibleUnique);
    CHECK(a.feasible);
    CHECK(!a.boundary);
    CHECK(rel_err(*a.z_star, 1.6164843058407354) <= 1e-11);
    CHECK(rel_err(*a.mu_star, 0.6029751998993413) <= 1e-11);
    CHECK(rel_err(*a.s_star, 0.6497999649656436) <= 1e-11);
    CHECK(a.f_residual < 1e-10);
    CHECK(*a.z_star < a.z_min);

    const auto b = solve_equilibrium({3.0, 1.05});
    REQUIRE(b.verdict == EquilibriumVerdict::FeasibleUnique);
    CHECK(rel_err(*b.z_star, 2.281938267157227) <= 1e-11);
    CHECK(rel_err(*b.mu_star, 1.1594756138183862) <= 1e-11);
    CHECK(rel_err(*b.s_star, 0.8819505910025968) <= 1e-11);
    CHECK(b.f_residual < 1e-10);
}

TEST_CASE("solver labels the infeasible side without inventing moments") {
    const auto res = solve_equilibrium({1.0, 3.0});
    REQUIRE(res.verdict == EquilibriumVerdict::InfeasibleRoot);
    CHECK(!res.feasible);
    REQUIRE(res.z_star.has_value());
    CHECK(*res.z_star > res.z_min);
    CHECK(rel_err(*res.z_star, 2.076704675610471) <= 1e-9);
    CHECK(!res.mu_star.has_value());
    CHECK(!res.s_star.has_value());
    CHECK(res.f_residual < 1e-10);
}

TEST_CASE("root beyond the search window reports NoRootFound") {
    // z* for (12, 3.9) sits near 1.6e5: below the default window cap.
    const auto res = solve_equilibrium({12.0, 3.9});
    CHECK(res.verdict == EquilibriumVerdict::NoRootFound);
    CHECK(!res.z_star.has_value());
    CHECK(std::isnan(res.f_residual));

    const auto wide = solve_equilibrium({12.0, 3.9}, 2e5);
    REQUIRE(wide.verdict == EquilibriumVerdict::FeasibleUnique);
    CHECK(rel_err(*wide.z_star, 158439.2987751686) <= 1e-6);
    CHECK(*wide.z_star < wide.z_min);
}

TEST_CASE("solver validation") {
    CHECK_THROWS_AS(solve_equilibrium({-1.0, 2.0}), std::domain_error);
    CHECK_THROWS_AS(solve_equilibrium({1.5, 1.0}), std::domain_error);
    CHECK_THROWS_AS(solve_equilibrium({1.5, 2.0}, 1e-13), std::domain_error);
    CHECK_THROWS_AS(solve_equilibrium({1.5, 2.0}, 30000.0, 8),
                    std::domain_error);
}

TEST_CASE("near the threshold curve the boundary flag is raised") {
    const double r = 1.5;
    const double R = feasibility_threshold(r);
    const auto lo = solve_equilibrium({r, R * (1.0 - 1e-13)});
    CHECK(lo.boundary);
    const auto hi = solve_equilibrium({r, R * (1.0 + 1e-13)});
    CHECK(hi.boundary);
    // A verdict is still produced either way; the flag marks it unresolved.
    CHECK(lo.z_star.has_value());
    CHECK(hi.z_star.has_value());
}

TEST_CASE("solved moments are fixed points of the closed map") {
    const Params cases[] = {{1.5, 2.0},  {3.0, 1.05}, {0.75, 1.001},
                            {0.75, 2.0}, {2.5, 1.05}, {0.5, 1.05},
                            {1.39, 1.10}};
    for (const auto p : cases) {
        const auto eq = solve_equilibrium(p);
        REQUIRE(eq.feasible);
        const auto o = step({*eq.mu_star, *eq.s_star}, p);
        REQUIRE(!o.breakdown());
        CHECK(rel_err(o.next->mu, *eq.mu_star) <= 1e-9);
        CHECK(rel_err(o.next->s, *eq.s_star) <= 1e-9);
    }
}

TEST_CASE("feasibility matches the threshold over a 200x200 grid") {
    const std::size_t nr = 200, nv = 200;
    const double r_lo = 0.1, r_hi = 10.0, v_lo = 1.01, v_hi = 4.5;
    const double dv = (v_hi - v_lo) / static_cast<double>(nv - 1);
    std::size_t checked = 0, skipped = 0;
    for (std::size_t iv = 0; iv < nv; ++iv) {
        const double v = v_lo + dv * static_cast<double>(iv);
        for (std::size_t ir = 0; ir < nr; ++ir) {
            const double r =
                r_lo + (r_hi - r_lo) * static_cast<double>(ir) /
                           static_cast<double>(nr - 1);
            const auto res = solve_equilibrium({r, v});
            REQUIRE(res.verdict != EquilibriumVerdict::NoRootFound);
            if (res.feasible) {
                CHECK(*res.z_star < std::expm1(r));
                CHECK(res.f_residual < 1e-10);
                CHECK(*res.mu_star > 0);
                CHECK(*res.s_star > 0);
            }
            if (std::fabs(v - feasibility_threshold(r)) <= dv) {
                ++skipped;  // within one cell of the curve: resolution-limited
                continue;
            }
            CHECK(res.feasible == (v < feasibility_threshold(r)));
            ++checked;
        }
    }
    CHECK(checked > 30000);  // the exclusion band must stay a thin sliver
    CHECK(skipped < 4000);
}

TEST_CASE("the root is unique over the working box") {
    for (std::size_t iv = 0; iv < 40; ++iv) {
        for (std::size_t ir = 0; ir < 40; ++ir) {
            const double r = 0.1 + (10.0 - 0.1) * static_cast<double>(ir) / 39.0;
            const double v = 1.01 + (4.5 - 1.01) * static_cast<double>(iv) / 39.0;
            CHECK(count_roots({r, v}) == 1);
        }
    }
    CHECK(count_roots({1.5, 2.0}) == 1);
    CHECK(count_roots({8.0, 4.4}) == 1);
    CHECK(count_roots({0.5, 1.05}) == 1);
    CHECK(count_roots({12.0, 3.9}) == 0);  // root beyond the window cap
    CHECK_THROWS_AS(count_roots({1.5, 2.0}, 30000.0, 32), std::domain_error);
}

TEST_CASE("the root function increases monotonically for small r") {
    const double v = 2.0;
    for (const double r : {0.5, 1.2, 2.0}) {
        double prev = aux_f(1e-6, r, v);
        for (const double z : log_spaced(1.1e-6, 1e4, 200)) {
            const double cur = aux_f(z, r, v);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("derivative at the feasibility edge stays positive for large r") {
    for (int i = 1; i <= 50; ++i) {
        const double r = 2.0 + 8.0 * static_cast<double>(i) / 50.0;
        CHECK(aux_f_prime(std::expm1(r), r) > 0);
    }
}

TEST_CASE("phi family: limits") {
    CHECK(std::fabs(phi(1e-10) - 2.0) <= 1e-6);
    CHECK(std::fabs(phi_prime(1e-10) + 1.0) <= 1e-5);
    CHECK(std::fabs(phi_second(1e-10) - 3.0) <= 1e-4);
    CHECK(std::fabs(h_func(1e-8) - 3.0) <= 1e-4);
    CHECK_THROWS_AS(phi(0.0), std::domain_error);
    CHECK_THROWS_AS(phi_prime(-1.0), std::domain_error);
    CHECK_THROWS_AS(phi_second(0.0), std::domain_error);
    CHECK_THROWS_AS(h_func(0.0), std::domain_error);
    CHECK_THROWS_AS(q_func(0.0), std::domain_error);
    CHECK_THROWS_AS(h_func_prime(0.0), std::domain_error);
}

TEST_CASE("phi family: second derivative vs finite differences") {
    for (const double z : log_spaced(0.01, 100.0, 30)) {
        const double h = 1e-4 * (1.0 + z);
        const double fd =
            (phi(z + h) - 2.0 * phi(z) + phi(z - h)) / (h * h);
        CHECK(rel_err(phi_second(z), fd) <= 1e-5);
    }
}

TEST_CASE("curvature envelope H: spot values against a 50-digit reference") {
    // Series region (below the 0.02 switch).
    CHECK(rel_err(h_func(1e-10), 2.99999999975) <= 1e-13);
    CHECK(rel_err(h_func(1e-8), 2.99999997500000025) <= 1e-13);
    CHECK(rel_err(h_func(1e-4), 2.9997500249973614) <= 1e-13);
    CHECK(rel_err(h_func(0.01), 2.975247390009535) <= 1e-13);
    // Direct quotient region.
    CHECK(rel_err(h_func(0.02), 2.950979345991253) <= 1e-11);
    CHECK(rel_err(h_func(0.05), 2.8809374053089064) <= 1e-11);
    CHECK(rel_err(h_func(1.0), 1.7309084476890267) <= 1e-11);
    CHECK(rel_err(h_func(100.0), 0.17300805842532746) <= 1e-11);
    CHECK(rel_err(h_func(1e6), 0.016628724120641015) <= 1e-11);
}

TEST_CASE("curvature envelope H: slow logarithmic tail") {
    const double tail = h_func(1e6);
    CHECK(tail > 0.0);
    CHECK(tail < 0.025);
    const double asym = 4.0 * std::log(2.0) / std::pow(std::log(1e6), 2.0);
    CHECK(std::fabs(tail - asym) <= 0.2 * asym);
}

TEST_CASE("H agrees with its definition and H' with finite differences") {
    for (const double z : log_spaced(0.01, 100.0, 30)) {
        const double w2 = 1.0 + 2.0 * z;
        CHECK(rel_err(h_func(z), w2 * w2 * phi_second(z)) <= 1e-12);
        const double h = 1e-4 * (1.0 + z);
        const double fd = (h_func(z + h) - h_func(z - h)) / (2.0 * h);
        CHECK(rel_err(h_func_prime(z), fd) <= 1e-5);
    }
}

TEST_CASE("H' and Q: spot values against a 50-digit reference") {
    CHECK(rel_err(h_func_prime(1e-6), -2.499995000007917) <= 1e-13);
    CHECK(rel_err(h_func_prime(1e-3), -2.495007904989291) <= 1e-11);
    CHECK(rel_err(h_func_prime(1.0), -0.6559968934737561) <= 1e-11);
    CHECK(rel_err(h_func_prime(100.0), -7.456843199276798e-4) <= 1e-11);
    CHECK(rel_err(h_func_prime(1e6), -2.559144761737329e-9) <= 1e-11);

    CHECK(rel_err(q_func(1e-6), 2.5000024999975e-24) <= 1e-12);
    CHECK(rel_err(q_func(1e-4), 2.500249975002055e-16) <= 1e-12);
    CHECK(rel_err(q_func(0.05), 1.6368728670916195e-5) <= 1e-12);
    CHECK(rel_err(q_func(1.0), 3.634250581805064) <= 1e-11);
    CHECK(rel_err(q_func(1e6), 1.8646367989340056e20) <= 1e-11);
}

TEST_CASE("sign structure holds over ten decades") {
    for (const double z : log_spaced(1e-6, 1e6, 10000)) {
        CHECK(phi_prime(z) < 0);
        CHECK(h_func(z) > 0);
        CHECK(h_func_prime(z) < 0);
        CHECK(q_func(z) > 0);
    }
}

}  // TEST_SUITE
