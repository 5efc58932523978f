#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "floquet.hpp"
#include "hill_determinant.hpp"
#include "params.hpp"

namespace hillwave {

/// Right-hand side of the exponent equation sin^2(pi nu / 2) = Delta(a,0) * s(a),
/// where s(a) = sin^2(pi sqrt(a) / 2) continues to (1 - cosh(pi sqrt(-a)))/2 for
/// a < 0 (real-valued for all real a).
struct wh_right {
    double value = 0.0;
    mathieu_params params;
};

/// The factor s(a): sin^2(pi sqrt(a)/2) for a >= 0, its real analytic
/// continuation (1 - cosh(pi sqrt(-a)))/2 for a < 0.
inline double sin_sq_half_period(double a) {
    const double pi = std::acos(-1.0);
    if (a >= 0.0) {
        const double t = std::sin(0.5 * pi * std::sqrt(a));
        return t * t;
    }
    return 0.5 * (1.0 - std::cosh(pi * std::sqrt(-a)));
}

/// Evaluate Delta(a,0) * s(a).  `tol` is the stopping tolerance handed to the
/// determinant series.  Throws near_pole_error when a is within pole_eps of
/// some 4 kappa^2 and no_convergence_error if the series fails to settle.
inline wh_right wh_rhs(const mathieu_params& p, double tol = 1e-12) {
    const double delta = delta_zero(p, tol);
    return {delta * sin_sq_half_period(p.a), p};
}

/// Canonical characteristic exponent from the closed-form right-hand side:
///   0 <= s <= 1 : stable, nu = (2/pi) arcsin(sqrt(s)) in [0, 1]
///   s > 1       : gap,    nu = 1 + i (2/pi) arccosh(sqrt(s))
///   s < 0       : gap,    nu = i (2/pi) arcsinh(sqrt(-s))
/// Canonical branch: re in [0, 1], im >= 0; full family is {+-nu + 2k}.
inline characteristic_exponent exponent_from_rhs(double s) {
    const double pi = std::acos(-1.0);
    characteristic_exponent nu;
    if (s < 0.0) {
        nu.re = 0.0;
        nu.im = (2.0 / pi) * std::asinh(std::sqrt(-s));
        nu.stability = stability_kind::unstable_gap;
    } else if (s > 1.0) {
        nu.re = 1.0;
        nu.im = (2.0 / pi) * std::acosh(std::sqrt(s));
        nu.stability = stability_kind::unstable_gap;
    } else {
        nu.re = (2.0 / pi) * std::asin(std::sqrt(s));
        nu.im = 0.0;
        nu.stability = stability_kind::stable;
    }
    return nu;
}

inline characteristic_exponent solve_exponent(const mathieu_params& p,
                                              double tol = 1e-12) {
    return exponent_from_rhs(wh_rhs(p, tol).value);
}

/// |sin^2(pi nu / 2) - s| evaluated through the real hyperbolic form matching
/// the branch of nu; 0 for a perfectly consistent (nu, s) pair.
inline double wh_branch_residual(const characteristic_exponent& nu, double s) {
    const double pi = std::acos(-1.0);
    double lhs;
    if (nu.im == 0.0) {
        const double t = std::sin(0.5 * pi * nu.re);
        lhs = t * t;
    } else if (nu.re == 0.0) {
        const double t = std::sinh(0.5 * pi * nu.im);
        lhs = -t * t;
    } else { // re == 1 branch
        const double t = std::cosh(0.5 * pi * nu.im);
        lhs = t * t;
    }
    return std::abs(lhs - s);
}

/// One node of a stability chart scan.
struct band_point {
    double a = 0.0;
    characteristic_exponent nu;
    double rhs = std::numeric_limits<double>::quiet_NaN();
    /// "" for a clean closed-form evaluation; "oracle_only" when a sits on a
    /// resonance 4 kappa^2 and the exponent comes from the ODE path; otherwise
    /// the error code of the per-point failure.
    std::string flag;
};

/// Scan nu(a) over an inclusive uniform grid of `steps`+1 nodes.  Per-point
/// failures are recorded in the flag and the scan continues; resonant nodes
/// fall back to the ODE discriminant.
inline std::vector<band_point> band_scan(double q, double a_min, double a_max,
                                         int steps, double tol = 1e-12) {
    if (steps < 1) throw std::invalid_argument("band_scan: steps must be >= 1");
    if (!(a_min <= a_max)) throw std::invalid_argument("band_scan: empty window");
    std::vector<band_point> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) {
        const double a =
            (i == steps) ? a_max : a_min + (a_max - a_min) * (double(i) / steps);
        band_point pt;
        pt.a = a;
        const mathieu_params p{a, q};
        try {
            const wh_right r = wh_rhs(p, tol);
            pt.rhs = r.value;
            pt.nu = exponent_from_rhs(r.value);
        } catch (const near_pole_error&) {
            pt.nu = exponent_from_mu(discriminant_mu(p));
            pt.flag = "oracle_only";
        } catch (const numeric_error& e) {
            pt.flag = e.code();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

namespace detail {

/// Bisection refinement of a sign change of f on [lo, hi] down to width tol.
template <class F>
double bisect_root(F&& f, double lo, double hi, double f_lo, double tol) {
    if (!(lo < hi)) throw no_bracket_error("bisect_root: empty bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_lo < 0.0) != (f_mid < 0.0)) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Band edges (values of a with integer exponent nu in {0, 1}) inside the
/// window, located as roots of F(a) = Delta(a,0) s(a) = 0 and F(a) = 1 by
/// scan-and-bisect.  For q = 0 the edges a = kappa^2 are returned exactly
/// (there F only touches the levels, so sign scanning cannot see them).
/// Throws no_bracket_error for an inverted window.
inline std::vector<double> band_edges(double q, std::pair<double, double> a_window,
                                      double tol = 1e-10) {
    const double lo = a_window.first, hi = a_window.second;
    if (!(lo <= hi)) throw no_bracket_error("band_edges: inverted window");
    std::vector<double> edges;
    if (q == 0.0) {
        for (int kappa = 0;; ++kappa) {
            const double a = double(kappa) * kappa;
            if (a > hi) break;
            if (a >= lo) edges.push_back(a);
        }
        return edges;
    }

    const auto F = [&](double a) { return wh_rhs({a, q}).value; };
    const int n_nodes = 1024;
    std::vector<double> xs(n_nodes + 1), fs(n_nodes + 1);
    std::vector<bool> ok(n_nodes + 1, false);
    for (int i = 0; i <= n_nodes; ++i) {
        xs[i] = (i == n_nodes) ? hi : lo + (hi - lo) * (double(i) / n_nodes);
        try {
            fs[i] = F(xs[i]);
            ok[i] = true;
        } catch (const numeric_error&) {
            ok[i] = false;
        }
    }
    for (int i = 0; i < n_nodes; ++i) {
        if (!ok[i] || !ok[i + 1]) continue;
        if ((fs[i] < 0.0) != (fs[i + 1] < 0.0))
            edges.push_back(detail::bisect_root(F, xs[i], xs[i + 1], fs[i], tol));
        const double g0 = fs[i] - 1.0, g1 = fs[i + 1] - 1.0;
        if ((g0 < 0.0) != (g1 < 0.0))
            edges.push_back(detail::bisect_root([&](double a) { return F(a) - 1.0; },
                                                xs[i], xs[i + 1], g0, tol));
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

} // namespace hillwave
