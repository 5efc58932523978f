// Tests for the generic third-order recursion machinery: trajectory
// iteration, span extension, closed-form coefficients, jump-chain
// combinatorics, the explicit solver, and its determinant instantiation.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hillwave/hillwave.hpp"

using namespace hillwave;
using Catch::Approx;

namespace {

// u_i = u_{i-1} + u_{i-2} + u_{i-3} (all coefficients 1).
recursion_system tribonacci(long k_max) {
    recursion_system sys;
    sys.a.assign(std::size_t(k_max) + 1, 1.0);
    sys.b.assign(std::size_t(k_max) + 1, 1.0);
    sys.c.assign(std::size_t(k_max) + 1, 1.0);
    return sys;
}

}  // namespace

TEST_CASE("trajectory iteration on the all-ones recursion") {
    const auto sys = tribonacci(10);
    const std::vector<double> u = iterate_trajectory(sys, 1.0, 1.0, 1.0, 10);
    const std::vector<double> expect{1, 1, 1, 3, 5, 9, 17, 31, 57, 105, 193};
    REQUIRE(u.size() == expect.size());
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == expect[i]);

    CHECK(direct_iterate(sys, 1.0, 1.0, 1.0, 10) == 193.0);
    CHECK_THROWS_AS(direct_iterate(sys, 1.0, 1.0, 1.0, 2),
                    index_out_of_validity_error);
}

TEST_CASE("two-term specialization: vanishing far coefficient") {
    // With c = 0 the recursion degenerates to u_i = u_{i-1} + u_{i-2}; from
    // seeds (1, 1, 1) the trajectory is 1, 1, 1, 2, 3, 5, 8, 13.
    recursion_system sys = tribonacci(7);
    for (auto& v : sys.c) v = 0.0;
    const std::vector<double> u = iterate_trajectory(sys, 1.0, 1.0, 1.0, 7);
    CHECK(u[5] == 5.0);
    CHECK(u[6] == 8.0);
    CHECK(u[7] == 13.0);
}

TEST_CASE("base form is the recursion itself and extension preserves it") {
    double u0 = 0, u1 = 0, u2 = 0;
    const recursion_system sys = verify::seeded_system(7, 30, &u0, &u1, &u2);
    const std::vector<double> u = iterate_trajectory(sys, u0, u1, u2, 30);

    sum_form f = base_form(sys, 30);
    CHECK(f.k == 30);
    CHECK(f.span == 3);
    CHECK(f.g[1] == sys.a[30]);
    CHECK(f.g[2] == sys.b[30]);
    CHECK(f.G == sys.c[30]);
    CHECK(f.evaluate(u) == Approx(u[30]).epsilon(1e-12));

    // Every extension rewrites u_k over a deeper window without changing it.
    while (f.span < 27) {
        f = extend_sum(f, sys);
        const double rel = std::abs(f.evaluate(u) - u[30]) /
                           std::max(1.0, std::abs(u[30]));
        CHECK(rel <= 1e-9);
    }
    CHECK(f.span == 27);
}

TEST_CASE("closed-form coefficients match the extension chain slot by slot") {
    double u0 = 0, u1 = 0, u2 = 0;
    const recursion_system sys = verify::seeded_system(99, 25, &u0, &u1, &u2);
    const long k = 25;

    for (long n : {3L, 4L, 5L, 8L, 12L}) {
        const sum_form f = detail::build_span_form(sys, k, n);
        INFO("span n = " << n);
        CHECK(big_g_closed_form(n, k, sys) == Approx(f.G).epsilon(1e-12));
        for (long j = 1; j <= n - 1; ++j) {
            INFO("slot j = " << j);
            const double closed = g_closed_form(n, k, j, sys);
            const double chained = f.g[std::size_t(j)];
            CHECK(closed == Approx(chained).margin(1e-12).epsilon(1e-10));
        }
    }

    CHECK_THROWS_AS(g_closed_form(5, k, 0, sys), index_out_of_validity_error);
    CHECK_THROWS_AS(g_closed_form(5, k, 5, sys), index_out_of_validity_error);
    CHECK_THROWS_AS(big_g_closed_form(2, k, sys), index_out_of_validity_error);
}

TEST_CASE("jump chains enumerate increasing breakpoint combinations") {
    // Counts follow the binomial C(ell-1, p-1).
    auto binom = [](int n, int r) {
        double v = 1.0;
        for (int t = 1; t <= r; ++t) v = v * (n - r + t) / t;
        return v;
    };
    for (int ell = 1; ell <= 12; ++ell) {
        for (int p = 1; p <= ell; ++p) {
            CHECK(enumerate_jumps(ell, p).size() ==
                  std::size_t(binom(ell - 1, p - 1) + 0.5));
        }
    }

    // The ten 4-jump chains from 0 to 6, in breakpoint-lexicographic order.
    const auto chains = enumerate_jumps(6, 4);
    REQUIRE(chains.size() == 10);
    using pairs_t = std::vector<std::pair<int, int>>;
    CHECK(chains.front().pairs == pairs_t{{0, 1}, {1, 2}, {2, 3}, {3, 6}});
    CHECK(chains[1].pairs == pairs_t{{0, 1}, {1, 2}, {2, 4}, {4, 6}});
    CHECK(chains.back().pairs == pairs_t{{0, 3}, {3, 4}, {4, 5}, {5, 6}});
    for (const auto& js : chains) {
        REQUIRE(js.pairs.size() == 4);
        CHECK(js.pairs.front().first == 0);
        CHECK(js.pairs.back().second == 6);
        for (std::size_t t = 0; t + 1 < js.pairs.size(); ++t)
            CHECK(js.pairs[t].second == js.pairs[t + 1].first);
    }

    // A single jump is the direct chain.
    const auto single = enumerate_jumps(5, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].pairs == pairs_t{{0, 5}});

    CHECK_THROWS_AS(enumerate_jumps(3, 4), index_out_of_validity_error);
    CHECK_THROWS_AS(enumerate_jumps(0, 1), index_out_of_validity_error);
    CHECK_THROWS_AS(enumerate_jumps(25, 2), index_out_of_validity_error);
}

TEST_CASE("elimination and jump-sum paths agree on the gamma coefficients") {
    double u0 = 0, u1 = 0, u2 = 0;
    const recursion_system sys = verify::seeded_system(4242, 40, &u0, &u1, &u2);
    const std::vector<double> u = iterate_trajectory(sys, u0, u1, u2, 40);

    for (long n : {8L, 11L}) {
        for (long k : {20L, 37L}) {
            for (long ell = 0; ell <= n - 4; ell += 2) {
                INFO("n = " << n << ", k = " << k << ", ell = " << ell);
                const gamma_result r = gamma_coeffs(n, k, ell, sys);
                CHECK(r.cross_path_deviation <= 1e-10);
                // The eliminated form still evaluates to u_k.
                const double rel = std::abs(r.form.evaluate(u) - u[std::size_t(k)]) /
                                   std::max(1.0, std::abs(u[std::size_t(k)]));
                CHECK(rel <= 1e-9);
            }
        }
    }
}

TEST_CASE("explicit solver reproduces direct iteration") {
    for (unsigned seed : {11u, 12u, 13u}) {
        double u0 = 0, u1 = 0, u2 = 0;
        const recursion_system sys = verify::seeded_system(seed, 30, &u0, &u1, &u2);
        const std::vector<double> u = iterate_trajectory(sys, u0, u1, u2, 30);
        for (long k : {15L, 30L}) {
            for (long n = 7; n <= k - 3 && n <= 14; ++n) {
                const double got =
                    solve_uk(sys, u[std::size_t(k - n + 3)], u[std::size_t(k - n + 2)],
                             u[std::size_t(k - n)], k, n);
                const double rel = std::abs(got - u[std::size_t(k)]) /
                                   std::max(1.0, std::abs(u[std::size_t(k)]));
                INFO("seed " << seed << ", k = " << k << ", n = " << n);
                CHECK(rel <= 1e-9);
            }
        }
    }
}

TEST_CASE("explicit solver validity window") {
    const auto sys = tribonacci(30);
    CHECK_THROWS_AS(solve_uk(sys, 1, 1, 1, 30, 6), index_out_of_validity_error);
    CHECK_THROWS_AS(solve_uk(sys, 1, 1, 1, 30, 28), index_out_of_validity_error);
    CHECK_THROWS_AS(solve_uk(sys, 1, 1, 1, 9, 7), index_out_of_validity_error);
}

TEST_CASE("explicit solver rejects vanishing divisors") {
    // Divisors are the b at indices k-n+3 .. k-1; zeroing one inside that
    // window must raise, identifying the index.
    auto sys = tribonacci(12);
    sys.b[9] = 1e-15;  // below the divisor floor
    try {
        const std::vector<double> u = iterate_trajectory(tribonacci(12), 1, 1, 1, 12);
        solve_uk(sys, u[7], u[6], u[4], 12, 8);
        FAIL("expected degenerate_b_error");
    } catch (const degenerate_b_error& e) {
        CHECK(e.index() == 9);
    }

    // A zero b outside the divisor window is harmless.
    auto sys2 = tribonacci(12);
    sys2.b[3] = 0.0;
    const std::vector<double> u2 = iterate_trajectory(sys2, 1, 1, 1, 12);
    const double got = solve_uk(sys2, u2[7], u2[6], u2[4], 12, 8);
    CHECK(got == Approx(u2[12]).epsilon(1e-12));
}

TEST_CASE("determinant sequence through the explicit solver") {
    const mathieu_params p{1.0, 1.0};

    // q = 0 short-circuits to the exact value 1.
    CHECK(delta_explicit({2.0, 0.0}, 20, 12) == 1.0);

    // Against the incremental series at matching truncation order.
    delta_stepper st(p);
    while (st.deltas().size() <= 40) st.advance();
    CHECK(delta_explicit(p, 20, 12) == Approx(st.deltas()[20]).epsilon(1e-10));
    CHECK(delta_explicit(p, 40, 37) == Approx(st.deltas()[40]).epsilon(1e-10));
    CHECK(delta_explicit(p, 40, 7) == Approx(st.deltas()[40]).epsilon(1e-10));

    CHECK_THROWS_AS(delta_explicit(p, 12, 10), index_out_of_validity_error);
    CHECK_THROWS_AS(delta_explicit(p, 20, 6), index_out_of_validity_error);
}

TEST_CASE("determinant instantiation hits a degenerate divisor on a gap edge") {
    // At q = 3 the weight beta_6 = 1 - alpha_6 has a root at
    // a* = 144.2036033111745 (bisected on [144.05, 144.45]; |beta_6| < 1e-13
    // there).  Choosing k = 13, n = 10 puts index 6 inside the divisor window
    // k-n+3 .. k-1 = 6 .. 12, so the explicit path must refuse.
    const double a_star = 144.2036033111745;
    const mathieu_params p{a_star, 3.0};
    CHECK(std::abs(beta(6, p)) < 1e-12);

    try {
        delta_explicit(p, 13, 10);
        FAIL("expected degenerate_b_error");
    } catch (const degenerate_b_error& e) {
        CHECK(e.index() == 6);
    }

    // Slightly off the root the same configuration is regular and correct.
    const mathieu_params p2{144.45, 3.0};
    delta_stepper st(p2);
    while (st.deltas().size() <= 13) st.advance();
    CHECK(delta_explicit(p2, 13, 10) == Approx(st.deltas()[13]).epsilon(1e-9));
}
