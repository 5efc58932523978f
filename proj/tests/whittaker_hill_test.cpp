// Tests for the closed-form exponent layer: the half-period factor, the
// right-hand side, branch extraction, stability-chart scanning, and band-edge
// location.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "hillwave/hillwave.hpp"

using namespace hillwave;
using Catch::Approx;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("half-period factor on both sides of a = 0") {
    CHECK(sin_sq_half_period(1.0) == Approx(1.0).epsilon(1e-15));
    CHECK(sin_sq_half_period(0.25) == Approx(0.5).epsilon(1e-14));
    CHECK(sin_sq_half_period(0.0) == Approx(0.0).margin(1e-30));
    CHECK(sin_sq_half_period(4.0) == Approx(0.0).margin(1e-30));

    // Analytic continuation below zero: (1 - cosh(pi sqrt(-a))) / 2.
    CHECK(sin_sq_half_period(-1.0) ==
          Approx(-5.2959766377607593).epsilon(1e-14));
    CHECK(sin_sq_half_period(-4.0) ==
          Approx(0.5 * (1.0 - std::cosh(2.0 * kPi))).epsilon(1e-14));

    // The two branches join continuously at a = 0.
    CHECK(std::abs(sin_sq_half_period(1e-12) - sin_sq_half_period(-1e-12)) <=
          1e-11);
}

TEST_CASE("right-hand side: free case and frozen references") {
    // q = 0: the determinant factor is exactly 1.
    CHECK(wh_rhs({-1.0, 0.0}).value ==
          Approx(-5.2959766377607593).epsilon(1e-14));
    CHECK(wh_rhs({0.25, 0.0}).value == Approx(0.5).epsilon(1e-14));

    // Frozen references (cross-validated against the integrator).
    CHECK(wh_rhs({5.0, 1.0}).value ==
          Approx(0.098280003006203709).epsilon(1e-12));
    CHECK(wh_rhs({1.0, 1.0}).value ==
          Approx(1.5991669340144552).epsilon(1e-12));

    // Resonant a propagates the pole rejection.
    CHECK_THROWS_AS(wh_rhs({4.0, 0.5}), near_pole_error);
    CHECK_THROWS_AS(wh_rhs({0.0, 1.0}), near_pole_error);
}

TEST_CASE("branch extraction from the right-hand side") {
    // Interior of a band.
    {
        const characteristic_exponent nu = exponent_from_rhs(0.5);
        CHECK(nu.stability == stability_kind::stable);
        CHECK(nu.re == Approx(0.5).epsilon(1e-14));
        CHECK(nu.im == 0.0);
        CHECK(wh_branch_residual(nu, 0.5) <= 1e-14);
    }
    // Band edges.
    CHECK(exponent_from_rhs(0.0).re == 0.0);
    CHECK(exponent_from_rhs(0.0).stability == stability_kind::stable);
    CHECK(exponent_from_rhs(1.0).re == Approx(1.0).epsilon(1e-14));
    CHECK(exponent_from_rhs(1.0).im == 0.0);

    // s > 1: gap pinned at re = 1.
    {
        const characteristic_exponent nu = exponent_from_rhs(1.6);
        CHECK(nu.stability == stability_kind::unstable_gap);
        CHECK(nu.re == 1.0);
        const double c = std::cosh(0.5 * kPi * nu.im);
        CHECK(c * c == Approx(1.6).epsilon(1e-12));
        CHECK(wh_branch_residual(nu, 1.6) <= 1e-12);
    }
    // s < 0: gap pinned at re = 0.
    {
        const characteristic_exponent nu = exponent_from_rhs(-5.3);
        CHECK(nu.stability == stability_kind::unstable_gap);
        CHECK(nu.re == 0.0);
        const double s = std::sinh(0.5 * kPi * nu.im);
        CHECK(-s * s == Approx(-5.3).epsilon(1e-12));
        CHECK(wh_branch_residual(nu, -5.3) <= 1e-12);
    }
}

TEST_CASE("canonical folding of real exponents") {
    CHECK(canonical_real_exponent(0.3) == Approx(0.3).epsilon(1e-15));
    CHECK(canonical_real_exponent(2.5) == Approx(0.5).epsilon(1e-15));
    CHECK(canonical_real_exponent(3.7) == Approx(0.3).epsilon(1e-13));
    CHECK(canonical_real_exponent(-0.3) == Approx(0.3).epsilon(1e-15));
    CHECK(canonical_real_exponent(1.0) == Approx(1.0).epsilon(1e-15));
    CHECK(canonical_real_exponent(2.0) == Approx(0.0).margin(1e-15));
    CHECK(canonical_real_exponent(-4.0) == Approx(0.0).margin(1e-15));
}

TEST_CASE("solved exponents at reference points") {
    // Free fold, kappa_0 = 1 family: nu = 2 - sqrt(2.3).
    {
        const characteristic_exponent nu = solve_exponent({2.3, 0.0});
        CHECK(nu.stability == stability_kind::stable);
        CHECK(nu.re == Approx(0.48342491118969).epsilon(1e-12));
    }
    // Plain free fold.
    CHECK(solve_exponent({0.25, 0.0}).re == Approx(0.5).epsilon(1e-13));

    // Coupled stable point.
    {
        const characteristic_exponent nu = solve_exponent({5.0, 1.0});
        CHECK(nu.stability == stability_kind::stable);
        CHECK(nu.re == Approx(0.20300075175474649).epsilon(1e-12));
    }
    // Coupled gap point.
    {
        const characteristic_exponent nu = solve_exponent({1.0, 1.0});
        CHECK(nu.stability == stability_kind::unstable_gap);
        CHECK(nu.re == 1.0);
        CHECK(nu.im == Approx(0.45345353444983105).epsilon(1e-12));
    }
    // Negative-a gap: s < 0 branch.
    {
        const characteristic_exponent nu = solve_exponent({-1.0, 0.5});
        CHECK(nu.stability == stability_kind::unstable_gap);
        CHECK(nu.re == 0.0);
        CHECK(nu.im > 0.9);
        CHECK(wh_branch_residual(nu, wh_rhs({-1.0, 0.5}).value) <= 1e-12);
    }
}

TEST_CASE("closed form agrees with the independent integrator") {
    for (mathieu_params p : {mathieu_params{1.0, 1.0}, mathieu_params{5.0, 1.0},
                             mathieu_params{-2.0, 1.5}, mathieu_params{7.1, 2.0}}) {
        const characteristic_exponent wh = solve_exponent(p);
        const characteristic_exponent ode = exponent_from_mu(p);
        INFO("a = " << p.a << ", q = " << p.q);
        CHECK(wh.stability == ode.stability);
        CHECK(wh.re == Approx(ode.re).margin(1e-8));
        CHECK(wh.im == Approx(ode.im).margin(1e-8));
    }
}

TEST_CASE("stability chart scan over the free equation") {
    const auto pts = band_scan(0.0, -1.0, 2.0, 3);
    REQUIRE(pts.size() == 4);

    // a = -1: gap with rhs on the continued branch.
    CHECK(pts[0].flag.empty());
    CHECK(pts[0].rhs == Approx(-5.2959766377607593).epsilon(1e-12));
    CHECK(pts[0].nu.stability == stability_kind::unstable_gap);
    CHECK(pts[0].nu.re == 0.0);

    // a = 0 with q = 0: the determinant factor is exactly 1 (no coupling, so
    // no resonance), and the node is the nu = 0 band edge.
    CHECK(pts[1].flag.empty());
    CHECK(std::abs(pts[1].a) <= 1e-9);
    CHECK(pts[1].rhs == 0.0);
    CHECK(pts[1].nu.stability == stability_kind::stable);
    CHECK(pts[1].nu.re == 0.0);
    CHECK(pts[1].nu.im == 0.0);

    // a ~ 1: interior edge of the first band, nu ~ 1.
    CHECK(pts[2].flag.empty());
    CHECK(pts[2].nu.stability == stability_kind::stable);
    CHECK(pts[2].nu.re == Approx(1.0).margin(1e-6));

    // a = 2: nu = 2 - sqrt(2).
    CHECK(pts[3].flag.empty());
    CHECK(pts[3].a == 2.0);
    CHECK(pts[3].nu.re == Approx(0.58578643762690508).epsilon(1e-12));

    CHECK_THROWS_AS(band_scan(1.0, 0.0, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(band_scan(1.0, 2.0, 1.0, 5), std::invalid_argument);
}

TEST_CASE("resonant interior node falls back to the integrator") {
    const auto pts = band_scan(0.5, 3.9, 4.1, 2);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].flag.empty());
    CHECK(pts[1].flag == "oracle_only");
    CHECK(pts[1].a == Approx(4.0));
    CHECK(std::isnan(pts[1].rhs));
    CHECK(pts[2].flag.empty());
}

TEST_CASE("band edges: free equation is exact") {
    CHECK(band_edges(0.0, {0.5, 10.0}) == std::vector<double>{1.0, 4.0, 9.0});
    CHECK(band_edges(0.0, {-1.0, 10.0}) ==
          std::vector<double>{0.0, 1.0, 4.0, 9.0});
    CHECK(band_edges(0.0, {-5.0, -0.5}).empty());
}

TEST_CASE("band edges at q = 1 match the integrator-located values") {
    // Frozen from an independent scan of the discriminant (1100 nodes,
    // bisection of mu -+ 1 to 1e-12): the seven transitions in [-1, 10].
    const std::vector<double> expect{
        -0.455138604106, -0.110248816998, 1.859108072500, 3.917024773374,
        4.371300982288,  9.047739286360,  9.078368820570};
    const std::vector<double> got = band_edges(1.0, {-1.0, 10.0}, 1e-10);
    REQUIRE(got.size() == expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        INFO("edge " << i);
        CHECK(got[i] == Approx(expect[i]).margin(1e-6));
    }
    // Edges come out sorted.
    for (std::size_t i = 0; i + 1 < got.size(); ++i) CHECK(got[i] < got[i + 1]);
}

TEST_CASE("band edge window handling") {
    // A window strictly inside a band contains no transition.
    CHECK(band_edges(1.0, {5.0, 8.0}).empty());
    // An inverted window cannot bracket anything.
    CHECK_THROWS_AS(band_edges(1.0, {3.0, 2.0}), no_bracket_error);
}
