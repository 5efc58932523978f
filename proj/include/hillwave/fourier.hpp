#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "floquet.hpp"
#include "hill_determinant.hpp"
#include "params.hpp"
#include "tridiagonal.hpp"

namespace hillwave {

/// Fourier data of a Floquet solution.  The coefficients c_{2 kappa} satisfy
///     ((2 kappa - nu)^2 - a) c_{2 kappa} + q (c_{2(kappa+1)} + c_{2(kappa-1)}) = 0,
/// and the solution they synthesize is
///     psi(z) = e^{i nu z} * sum_kappa c_{2 kappa} e^{-2 i kappa z}.
/// (With this recurrence orientation the kappa-th harmonic rides at frequency
/// nu - 2 kappa; flipping the sign of kappa in both places gives the
/// equivalent +2 i kappa z convention.)
struct fourier_coefficients {
    int order = 0;                             ///< truncation half-width n
    std::vector<std::complex<double>> coeffs;  ///< index kappa + order, kappa = -n..n
    characteristic_exponent nu;
    double matrix_residual = 0.0;  ///< l2 norm of A c for the returned unit vector
    bool boundary_decay_ok = false;  ///< |c_{+-n}| <= 1e-8 * max |c|
    bool at_band_edge = false;       ///< nu within 1e-9 of an integer (single-solution case)

    std::complex<double> at(int kappa) const {
        return coeffs[static_cast<std::size_t>(kappa + order)];
    }
};

namespace detail {

inline bool integer_exponent(const characteristic_exponent& nu) {
    return std::abs(nu.im) <= 1e-9 &&
           std::abs(nu.re - std::round(nu.re)) <= 1e-9;
}

inline double l2_norm(const std::vector<std::complex<double>>& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

/// Normalize to unit l2 and rotate so the largest-magnitude coefficient is
/// real positive; ties within 1e-12 of the max go to the lowest kappa.
inline void normalize_and_fix_phase(std::vector<std::complex<double>>& c) {
    const double nrm = l2_norm(c);
    if (nrm > 0.0)
        for (auto& x : c) x /= nrm;
    double mx = 0.0;
    for (const auto& x : c) mx = std::max(mx, std::abs(x));
    std::size_t sel = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (std::abs(c[i]) >= mx - 1e-12) {
            sel = i;
            break;
        }
    }
    const std::complex<double> pivot = c[sel];
    if (std::abs(pivot) > 0.0) {
        const std::complex<double> rot = std::conj(pivot) / std::abs(pivot);
        for (auto& x : c) x *= rot;
        c[sel] = std::complex<double>(std::abs(c[sel]), 0.0);
    }
}

} // namespace detail

/// Polish a characteristic exponent against the order-n truncated system so
/// that det A_n(nu) = 0 to machine precision (secant iteration seeded by the
/// given exponent).  A converged determinant-limit exponent is accurate to
/// roughly the determinant stopping tolerance, which leaves the truncated
/// matrix singular only to that level; inverse iteration then stalls at the
/// same level.  Polishing moves the exponent by O(tolerance) — far below
/// every downstream bound — and lets the null-vector solve reach rounding
/// accuracy.  Stable exponents are polished along the real axis, gap
/// exponents along the imaginary axis (the truncated determinant is real on
/// both families).  Band-edge (integer) exponents are returned unchanged:
/// the determinant has even-order contact there and secant steps are
/// ill-posed.
inline characteristic_exponent refine_exponent(const characteristic_exponent& nu,
                                               const mathieu_params& p, int n) {
    if (n < 1) throw index_out_of_validity_error("refine_exponent: order must be >= 1");
    if (p.q == 0.0 || detail::integer_exponent(nu)) return nu;

    const bool along_re = nu.stability == stability_kind::stable;
    const auto assemble = [&](double t) {
        characteristic_exponent e = nu;
        (along_re ? e.re : e.im) = t;
        return e;
    };
    const auto f = [&](double t) {
        return det_direct(build_truncated(n, assemble(t).value(), p)).real();
    };

    const double t_start = along_re ? nu.re : nu.im;
    double t0 = t_start;
    double t1 = t0 + std::max(1e-9, 1e-9 * std::abs(t0));
    double f0 = f(t0), f1 = f(t1);
    for (int it = 0; it < 16; ++it) {
        if (f1 == f0) break;
        const double t2 = t1 - f1 * (t1 - t0) / (f1 - f0);
        if (!std::isfinite(t2) || std::abs(t2 - t_start) > 1e-6) break;
        t0 = t1;
        f0 = f1;
        t1 = t2;
        f1 = f(t1);
        if (std::abs(t1 - t0) <= 1e-15 * std::max(1.0, std::abs(t1))) break;
    }
    // Keep whichever endpoint actually has the smaller determinant.
    const double t_best = std::abs(f1) <= std::abs(f0) ? t1 : t0;
    return assemble(t_best);
}

/// Near-null vector of the order-n truncated coefficient system at (nu, a, q),
/// by inverse iteration from a fixed-seed random start, stopping once the
/// direction settles to 1e-12 (phase-aligned l2 change).  Throws
/// not_near_singular_error when the best direction still has residual
/// ||A c|| > 1e-6, i.e. (nu, a) is not actually a solution pair of the
/// truncated system; near_pole_error if the truncation hits a resonance.
inline fourier_coefficients solve_coefficients(const characteristic_exponent& nu,
                                               const mathieu_params& p, int n) {
    if (n < 1) throw index_out_of_validity_error("solve_coefficients: order must be >= 1");
    fourier_coefficients fc;
    fc.order = n;
    fc.nu = nu;
    fc.at_band_edge = detail::integer_exponent(nu);
    const std::size_t dim = 2 * static_cast<std::size_t>(n) + 1;

    if (p.q == 0.0) {
        // Decoupled system: the single harmonic closest to the dispersion
        // relation (2 kappa - nu)^2 = a carries everything.
        const std::complex<double> nv = nu.value();
        int best = -n;
        double best_mag = std::abs((2.0 * (-n) - nv) * (2.0 * (-n) - nv) - p.a);
        for (int kappa = -n + 1; kappa <= n; ++kappa) {
            const double mag =
                std::abs((2.0 * kappa - nv) * (2.0 * kappa - nv) - p.a);
            if (mag < best_mag) {
                best_mag = mag;
                best = kappa;
            }
        }
        fc.coeffs.assign(dim, std::complex<double>(0.0));
        fc.coeffs[static_cast<std::size_t>(best + n)] = 1.0;
        fc.matrix_residual = 0.0;
        fc.boundary_decay_ok = std::abs(best) < n;
        return fc;
    }

    const tridiagonal<std::complex<double>> A = build_truncated(n, nu.value(), p);

    std::mt19937_64 rng(0x68696C6C77617665ULL);
    const auto unit_draw = [&]() {
        return (static_cast<double>(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
    };
    std::vector<std::complex<double>> x(dim);
    for (auto& v : x) v = {unit_draw(), unit_draw()};
    {
        const double nrm = detail::l2_norm(x);
        for (auto& v : x) v /= nrm;
    }

    for (int it = 0; it < 200; ++it) {
        std::vector<std::complex<double>> y = solve_tridiagonal(A, x);
        const double nrm = detail::l2_norm(y);
        if (!(nrm > 0.0) || !std::isfinite(nrm))
            throw not_near_singular_error(
                std::numeric_limits<double>::quiet_NaN(),
                "solve_coefficients: inverse iteration produced a non-finite iterate");
        for (auto& v : y) v /= nrm;

        std::complex<double> inner(0.0);
        for (std::size_t i = 0; i < dim; ++i) inner += y[i] * std::conj(x[i]);
        std::complex<double> rot(1.0);
        if (std::abs(inner) > 0.0) rot = std::conj(inner) / std::abs(inner);
        double diff_sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) diff_sq += std::norm(rot * y[i] - x[i]);
        x = std::move(y);
        if (std::sqrt(diff_sq) <= 1e-12) break;
    }

    const std::vector<std::complex<double>> r = apply_tridiagonal(A, x);
    const double residual = detail::l2_norm(r);
    if (residual > 1e-6)
        throw not_near_singular_error(
            residual, "solve_coefficients: residual " + std::to_string(residual) +
                          " exceeds 1e-6; the exponent/eigenvalue pair does not "
                          "solve the truncated system");

    // The truncated system stores row r as harmonic kappa = n - r (descending);
    // flip to ascending-kappa order so at(kappa) indexes coeffs[kappa + order].
    std::reverse(x.begin(), x.end());
    detail::normalize_and_fix_phase(x);
    fc.coeffs = std::move(x);
    fc.matrix_residual = residual;
    double mx = 0.0;
    for (const auto& v : fc.coeffs) mx = std::max(mx, std::abs(v));
    fc.boundary_decay_ok = std::abs(fc.coeffs.front()) <= 1e-8 * mx &&
                           std::abs(fc.coeffs.back()) <= 1e-8 * mx;
    return fc;
}

/// Repeatedly double the truncation (from 16, capped at 512) until the
/// boundary coefficients have decayed below 1e-8 of the peak; returns the
/// last attempt (flag boundary_decay_ok reports whether the cap was hit
/// before the decay target).
inline fourier_coefficients solve_coefficients_auto(const characteristic_exponent& nu,
                                                    const mathieu_params& p) {
    int n = 16;
    for (;;) {
        fourier_coefficients fc = solve_coefficients(nu, p, n);
        if (fc.boundary_decay_ok || n >= 512) return fc;
        n *= 2;
    }
}

/// Evaluate psi(z) = e^{i nu z} sum_kappa c_{2 kappa} e^{-2 i kappa z}.
inline std::complex<double> synthesize(const fourier_coefficients& fc, double z) {
    const std::complex<double> i_unit(0.0, 1.0);
    const std::complex<double> nv = fc.nu.value();
    std::complex<double> s(0.0);
    for (int kappa = -fc.order; kappa <= fc.order; ++kappa)
        s += fc.at(kappa) * std::exp(i_unit * (nv - 2.0 * kappa) * z);
    return s;
}

/// Term-by-term derivative of the synthesis.
inline std::complex<double> synthesize_derivative(const fourier_coefficients& fc,
                                                  double z) {
    const std::complex<double> i_unit(0.0, 1.0);
    const std::complex<double> nv = fc.nu.value();
    std::complex<double> s(0.0);
    for (int kappa = -fc.order; kappa <= fc.order; ++kappa) {
        const std::complex<double> freq = nv - 2.0 * kappa;
        s += fc.at(kappa) * i_unit * freq * std::exp(i_unit * freq * z);
    }
    return s;
}

/// Max over an inclusive uniform grid on [0, pi] of |psi'' + (a - 2q cos 2z) psi|,
/// with psi'' evaluated analytically term by term.
inline double residual(const fourier_coefficients& fc, const mathieu_params& p,
                       int grid) {
    if (grid < 16) throw index_out_of_validity_error("residual: grid must be >= 16");
    const double pi = std::acos(-1.0);
    const std::complex<double> i_unit(0.0, 1.0);
    const std::complex<double> nv = fc.nu.value();
    double worst = 0.0;
    for (int j = 0; j < grid; ++j) {
        const double z = pi * double(j) / double(grid - 1);
        std::complex<double> psi(0.0), ddpsi(0.0);
        for (int kappa = -fc.order; kappa <= fc.order; ++kappa) {
            const std::complex<double> freq = nv - 2.0 * kappa;
            const std::complex<double> term = fc.at(kappa) * std::exp(i_unit * freq * z);
            psi += term;
            ddpsi -= freq * freq * term;
        }
        const double w = p.a - 2.0 * p.q * std::cos(2.0 * z);
        worst = std::max(worst, std::abs(ddpsi + w * psi));
    }
    return worst;
}

/// Max over the grid of |psi(z + pi) - e^{i nu pi} psi(z)|: zero to rounding
/// for any synthesized form (it is Floquet by construction), so this measures
/// only evaluation noise unless the coefficients were externally perturbed.
inline double floquet_defect(const fourier_coefficients& fc, int grid) {
    if (grid < 16)
        throw index_out_of_validity_error("floquet_defect: grid must be >= 16");
    const double pi = std::acos(-1.0);
    const std::complex<double> mult =
        std::exp(std::complex<double>(0.0, 1.0) * fc.nu.value() * pi);
    double worst = 0.0;
    for (int j = 0; j < grid; ++j) {
        const double z = pi * double(j) / double(grid - 1);
        worst = std::max(worst,
                         std::abs(synthesize(fc, z + pi) - mult * synthesize(fc, z)));
    }
    return worst;
}

/// Independent-route Floquet check: take the synthesized initial data
/// (psi(0), psi'(0)), propagate them across [0, pi] with the ODE integrator's
/// real fundamental system, and compare endpoint value and slope against the
/// multiplier relation psi(pi) = e^{i nu pi} psi(0).
inline double ode_round_trip_defect(const fourier_coefficients& fc,
                                    const mathieu_params& p,
                                    const ode_settings& s = {}) {
    const fundamental_pair f = integrate_fundamental(p, s);
    const std::complex<double> A = synthesize(fc, 0.0);
    const std::complex<double> B = synthesize_derivative(fc, 0.0);
    const std::complex<double> mult =
        std::exp(std::complex<double>(0.0, 1.0) * fc.nu.value() * std::acos(-1.0));
    const std::complex<double> end_val = A * f.psi1_end + B * f.psi2_end;
    const std::complex<double> end_slope = A * f.dpsi1_end + B * f.dpsi2_end;
    return std::max(std::abs(end_val - mult * A), std::abs(end_slope - mult * B));
}

} // namespace hillwave
