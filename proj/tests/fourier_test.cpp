// Tests for the harmonic-coefficient solver and the synthesized wave: null
// vector extraction, normalization, the synthesis orientation, residuals, and
// the quasi-periodicity of the result.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "hillwave/hillwave.hpp"

using namespace hillwave;
using Catch::Approx;

namespace {
constexpr double kPi = 3.14159265358979323846;

double max_abs(const fourier_coefficients& fc) {
    double m = 0.0;
    for (const auto& c : fc.coeffs) m = std::max(m, std::abs(c));
    return m;
}

// Max scaled residual of the three-term recurrence
//   ((2k - nu)^2 - a) c_k + q (c_{k+1} + c_{k-1}) = 0
// over the interior harmonics.
double recurrence_defect(const fourier_coefficients& fc, const mathieu_params& p) {
    const std::complex<double> nu = fc.nu.value();
    double worst = 0.0;
    for (int k = -fc.order + 1; k <= fc.order - 1; ++k) {
        const std::complex<double> row =
            ((2.0 * k - nu) * (2.0 * k - nu) - p.a) * fc.at(k) +
            p.q * (fc.at(k + 1) + fc.at(k - 1));
        worst = std::max(worst, std::abs(row));
    }
    return worst / max_abs(fc);
}

}  // namespace

TEST_CASE("free equation: a single harmonic carries the wave") {
    // a = nu^2 family: the null vector is the kappa = 0 unit coefficient.
    const characteristic_exponent nu{0.5, 0.0, stability_kind::stable};
    const fourier_coefficients fc = solve_coefficients(nu, {0.25, 0.0}, 8);

    CHECK(fc.order == 8);
    CHECK(std::abs(fc.at(0) - 1.0) <= 1e-12);
    for (int k = -8; k <= 8; ++k) {
        if (k != 0) CHECK(std::abs(fc.at(k)) <= 1e-12);
    }
    CHECK(fc.boundary_decay_ok);
    CHECK_FALSE(fc.at_band_edge);
    CHECK(fc.matrix_residual <= 1e-12);

    // The synthesized wave is exactly e^{i nu z}.
    for (double z : {0.0, 0.7, 2.9}) {
        const std::complex<double> expect =
            std::exp(std::complex<double>{0.0, 0.5 * z});
        CHECK(std::abs(synthesize(fc, z) - expect) <= 1e-12);
    }
}

TEST_CASE("free equation: folded exponent lands on the kappa = 1 harmonic") {
    // a = 2.3: the canonical exponent is nu = 2 - sqrt(2.3), carried by the
    // kappa = 1 harmonic, and the synthesized wave must be e^{-i sqrt(2.3) z}.
    // This pins the orientation of the synthesis sum.
    const characteristic_exponent nu = solve_exponent({2.3, 0.0});
    REQUIRE(nu.re == Approx(0.48342491118969).epsilon(1e-12));

    const fourier_coefficients fc = solve_coefficients(nu, {2.3, 0.0}, 8);
    CHECK(std::abs(fc.at(1) - 1.0) <= 1e-10);
    CHECK(std::abs(fc.at(0)) <= 1e-10);
    CHECK(std::abs(fc.at(-1)) <= 1e-10);

    const double root = std::sqrt(2.3);
    for (double z : {0.3, 1.234, 2.0}) {
        const std::complex<double> expect =
            std::exp(std::complex<double>{0.0, -root * z});
        CHECK(std::abs(synthesize(fc, z) - expect) <= 1e-10);
    }
    CHECK(residual(fc, {2.3, 0.0}, 64) <= 1e-12);
}

TEST_CASE("gap point: full pipeline meets its quality bars") {
    const mathieu_params p{1.0, 1.0};
    const characteristic_exponent nu0 = solve_exponent(p);
    const characteristic_exponent nu = refine_exponent(nu0, p, 32);

    // Refinement is a tiny correction, not a different answer.
    CHECK(std::abs(nu.value() - nu0.value()) <= 1e-6);
    CHECK(nu.stability == nu0.stability);

    const fourier_coefficients fc = solve_coefficients(nu, p, 32);
    CHECK(fc.order == 32);
    CHECK(fc.boundary_decay_ok);
    CHECK_FALSE(fc.at_band_edge);
    CHECK(fc.matrix_residual <= 1e-8);
    CHECK(recurrence_defect(fc, p) <= 1e-10);
    CHECK(residual(fc, p, 64) <= 1e-8);
    CHECK(floquet_defect(fc, 64) <= 1e-7);
    CHECK(ode_round_trip_defect(fc, p) <= 1e-7);

    // Unit norm, distinguished coefficient real positive.
    double norm2 = 0.0;
    for (const auto& c : fc.coeffs) norm2 += std::norm(c);
    CHECK(norm2 == Approx(1.0).epsilon(1e-12));
    // Phase rule: the lowest kappa within 1e-12 of the max magnitude is made
    // real positive (at this gap point kappa = 0 and 1 tie exactly, since the
    // system pairs harmonics kappa and 1 - kappa).
    const double mx = max_abs(fc);
    int k_big = fc.order;
    for (int k = -fc.order; k <= fc.order; ++k) {
        if (std::abs(fc.at(k)) >= mx - 1e-12) {
            k_big = k;
            break;
        }
    }
    CHECK(k_big == 0);
    CHECK(std::abs(fc.at(1)) == Approx(std::abs(fc.at(0))).epsilon(1e-12));
    CHECK(fc.at(k_big).imag() == Approx(0.0).margin(1e-14));
    CHECK(fc.at(k_big).real() > 0.0);
}

TEST_CASE("stable point: full pipeline meets its quality bars") {
    const mathieu_params p{5.0, 1.0};
    const characteristic_exponent nu = refine_exponent(solve_exponent(p), p, 32);
    const fourier_coefficients fc = solve_coefficients(nu, p, 32);

    CHECK(fc.boundary_decay_ok);
    CHECK(fc.matrix_residual <= 1e-8);
    CHECK(recurrence_defect(fc, p) <= 1e-10);
    CHECK(residual(fc, p, 64) <= 1e-8);
    CHECK(floquet_defect(fc, 64) <= 1e-7);
    CHECK(ode_round_trip_defect(fc, p) <= 1e-7);

    // Quasi-periodicity, checked directly: psi(z + pi) = e^{i pi nu} psi(z).
    const std::complex<double> eps =
        std::exp(std::complex<double>{0.0, kPi} * fc.nu.value());
    for (double z : {0.1, 1.3}) {
        const std::complex<double> lhs = synthesize(fc, z + kPi);
        const std::complex<double> rhs = eps * synthesize(fc, z);
        CHECK(std::abs(lhs - rhs) <= 1e-10);
    }

    // The derivative synthesis matches a central difference.
    const double h = 1e-5;
    for (double z : {0.4, 2.2}) {
        const std::complex<double> fd =
            (synthesize(fc, z + h) - synthesize(fc, z - h)) / (2.0 * h);
        CHECK(std::abs(synthesize_derivative(fc, z) - fd) <= 1e-6);
    }
}

TEST_CASE("refinement is the identity when nothing needs fixing") {
    // q = 0: the exponent is already exact.
    const characteristic_exponent nu{0.37, 0.0, stability_kind::stable};
    const characteristic_exponent r = refine_exponent(nu, {0.1369, 0.0}, 16);
    CHECK(r.re == nu.re);
    CHECK(r.im == nu.im);

    // Integer exponent (band edge): left untouched.
    const characteristic_exponent edge{0.0, 0.0, stability_kind::stable};
    const characteristic_exponent r2 = refine_exponent(edge, {-0.455138604106, 1.0}, 16);
    CHECK(r2.re == edge.re);
    CHECK(r2.im == edge.im);
}

TEST_CASE("a wrong exponent is rejected, not silently fitted") {
    const mathieu_params p{5.0, 1.0};
    const characteristic_exponent wrong{0.35, 0.0, stability_kind::stable};
    try {
        solve_coefficients(wrong, p, 24);
        FAIL("expected not_near_singular_error");
    } catch (const not_near_singular_error& e) {
        CHECK(e.residual() >= 1e-3);
    }
}

TEST_CASE("band edge: symmetric null vector at an integer exponent") {
    // At nu = 0 the truncated system is centrosymmetric, so the edge wave has
    // mirror-symmetric harmonics.  a is the lowest q = 1 transition.
    const mathieu_params p{-0.455138604106, 1.0};
    const characteristic_exponent edge{0.0, 0.0, stability_kind::stable};
    const fourier_coefficients fc = solve_coefficients(edge, p, 24);

    CHECK(fc.at_band_edge);
    CHECK(fc.matrix_residual <= 1e-6);
    for (int k = 1; k <= 24; ++k) {
        INFO("harmonic " << k);
        CHECK(std::abs(fc.at(k) - fc.at(-k)) <= 1e-6);
    }
    // A genuine multi-harmonic profile, dominated by kappa = 0.
    CHECK(std::abs(fc.at(0)) > 0.9);
    CHECK(std::abs(fc.at(1)) > 0.05);
}

TEST_CASE("automatic sizing stops once the boundary is clean") {
    const mathieu_params p{1.0, 1.0};
    const characteristic_exponent nu = refine_exponent(solve_exponent(p), p, 32);
    const fourier_coefficients fc = solve_coefficients_auto(nu, p);
    CHECK(fc.boundary_decay_ok);
    CHECK(fc.order == 16);  // the first attempted size already decays
}

TEST_CASE("two consecutive vanishing harmonics annihilate the wave") {
    // The three-term recurrence propagates a double zero in both directions,
    // so a nontrivial solution can never have two consecutive zero
    // coefficients; equivalently, forward propagation from a double zero
    // stays identically zero.
    const mathieu_params p{1.7, 0.9};
    const std::complex<double> nu{0.4, 0.0};
    std::complex<double> cm1 = 0.0, c0 = 0.0;  // c_{j-1} = c_j = 0
    double biggest = 0.0;
    for (int k = 0; k < 20; ++k) {
        const std::complex<double> next =
            -(((2.0 * k - nu) * (2.0 * k - nu) - p.a) * c0 + p.q * cm1) / p.q;
        biggest = std::max(biggest, std::abs(next));
        cm1 = c0;
        c0 = next;
    }
    CHECK(biggest == 0.0);
}
