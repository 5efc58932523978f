#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "params.hpp"

namespace hillwave {

/// Fundamental solution pair of psi'' + (a - 2 q cos 2z) psi = 0 at z = pi,
/// integrated from the canonical initial data psi1(0)=1, psi1'(0)=0 and
/// psi2(0)=0, psi2'(0)=1.
struct fundamental_pair {
    double psi1_end = 0.0;
    double dpsi1_end = 0.0;
    double psi2_end = 0.0;
    double dpsi2_end = 0.0;

    /// Wronskian at the endpoint; identically 1 for the exact flow.
    double wronskian() const { return psi1_end * dpsi2_end - dpsi1_end * psi2_end; }
};

/// Integration controls for the oracle.
struct ode_settings {
    double rtol = 1e-10;
    double atol = 1e-12;
    long max_steps = 1000000;
};

namespace detail {

/// One Dormand-Prince 5(4) step for the 4-dimensional fundamental system.
/// Returns the embedded error estimate in `err`.
struct dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // Difference between the 5th and the embedded 4th order weights.
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

using state4 = std::array<double, 4>;

inline state4 mathieu_rhs(double z, const state4& y, const mathieu_params& p) {
    const double w = p.a - 2.0 * p.q * std::cos(2.0 * z);
    return {y[1], -w * y[0], y[3], -w * y[2]};
}

} // namespace detail

/// Integrate the fundamental pair across one half-period [0, pi] with an
/// adaptive embedded Runge-Kutta 5(4) pair.  Throws step_failure_error on
/// step-size underflow or when the step budget is exhausted.
inline fundamental_pair integrate_fundamental(const mathieu_params& p,
                                              const ode_settings& s = {}) {
    using detail::state4;
    using rk = detail::dopri5;
    const double z_end = std::acos(-1.0);

    state4 y = {1.0, 0.0, 0.0, 1.0};
    double z = 0.0;
    double h = std::min(1e-2, z_end);
    const double h_min = 16.0 * 2.220446049250313e-16 * z_end;

    state4 k1 = detail::mathieu_rhs(z, y, p);
    long steps = 0;
    while (z < z_end) {
        if (++steps > s.max_steps)
            throw step_failure_error("integrate_fundamental: step budget exhausted (" +
                                     std::to_string(s.max_steps) + ")");
        if (h < h_min)
            throw step_failure_error("integrate_fundamental: step size underflow");
        if (z + h > z_end) h = z_end - z;

        state4 yt, k2, k3, k4, k5, k6, k7, y5;
        for (int i = 0; i < 4; ++i) yt[i] = y[i] + h * rk::a21 * k1[i];
        k2 = detail::mathieu_rhs(z + rk::c2 * h, yt, p);
        for (int i = 0; i < 4; ++i) yt[i] = y[i] + h * (rk::a31 * k1[i] + rk::a32 * k2[i]);
        k3 = detail::mathieu_rhs(z + rk::c3 * h, yt, p);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (rk::a41 * k1[i] + rk::a42 * k2[i] + rk::a43 * k3[i]);
        k4 = detail::mathieu_rhs(z + rk::c4 * h, yt, p);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (rk::a51 * k1[i] + rk::a52 * k2[i] + rk::a53 * k3[i] +
                                rk::a54 * k4[i]);
        k5 = detail::mathieu_rhs(z + rk::c5 * h, yt, p);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (rk::a61 * k1[i] + rk::a62 * k2[i] + rk::a63 * k3[i] +
                                rk::a64 * k4[i] + rk::a65 * k5[i]);
        k6 = detail::mathieu_rhs(z + h, yt, p);
        for (int i = 0; i < 4; ++i)
            y5[i] = y[i] + h * (rk::b1 * k1[i] + rk::b3 * k3[i] + rk::b4 * k4[i] +
                                rk::b5 * k5[i] + rk::b6 * k6[i]);
        k7 = detail::mathieu_rhs(z + h, y5, p);

        double err_norm = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double e = h * (rk::e1 * k1[i] + rk::e3 * k3[i] + rk::e4 * k4[i] +
                                  rk::e5 * k5[i] + rk::e6 * k6[i] + rk::e7 * k7[i]);
            const double sc = s.atol + s.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err_norm += (e / sc) * (e / sc);
        }
        err_norm = std::sqrt(err_norm / 4.0);

        if (err_norm <= 1.0) {
            z += h;
            y = y5;
            k1 = k7; // first-same-as-last
        }
        const double factor =
            (err_norm > 0.0) ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
    return {y[0], y[1], y[2], y[3]};
}

/// Half-trace of the monodromy matrix: mu(a) = (psi1(pi) + psi2'(pi)) / 2.
/// The exponent satisfies cos(pi nu) = mu.
inline double discriminant_mu(const mathieu_params& p, const ode_settings& s = {}) {
    const fundamental_pair f = integrate_fundamental(p, s);
    return 0.5 * (f.psi1_end + f.dpsi2_end);
}

/// Canonical exponent from the discriminant:
///   |mu| <= 1 : nu = arccos(mu)/pi         (stable, nu real in [0, 1])
///   mu  >  1 : nu = i arccosh(mu)/pi       (gap, re = 0)
///   mu  < -1 : nu = 1 + i arccosh(-mu)/pi  (gap, re = 1)
inline characteristic_exponent exponent_from_mu(double mu) {
    const double pi = std::acos(-1.0);
    characteristic_exponent nu;
    if (mu > 1.0) {
        nu.re = 0.0;
        nu.im = std::acosh(mu) / pi;
        nu.stability = stability_kind::unstable_gap;
    } else if (mu < -1.0) {
        nu.re = 1.0;
        nu.im = std::acosh(-mu) / pi;
        nu.stability = stability_kind::unstable_gap;
    } else {
        nu.re = std::acos(mu) / pi;
        nu.im = 0.0;
        nu.stability = stability_kind::stable;
    }
    return nu;
}

/// Exponent straight from the ODE: integrate, take the discriminant, map.
inline characteristic_exponent exponent_from_mu(const mathieu_params& p,
                                                const ode_settings& s = {}) {
    return exponent_from_mu(discriminant_mu(p, s));
}

} // namespace hillwave
