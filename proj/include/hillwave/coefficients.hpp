#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>

#include "errors.hpp"
#include "params.hpp"

namespace hillwave {

/// Coupling coefficient of the normalized three-term system:
///   xi_{2kappa}(nu) = q / ((2 kappa - nu)^2 - a).
/// Throws near_pole_error when the denominator falls inside the guard band.
inline std::complex<double> xi(int kappa, std::complex<double> nu, const mathieu_params& p) {
    const std::complex<double> den = (2.0 * kappa - nu) * (2.0 * kappa - nu) - p.a;
    if (std::abs(den) <= pole_eps) {
        throw near_pole_error(kappa, "xi: denominator (2k-nu)^2 - a within " +
                                         std::to_string(pole_eps) + " of zero at kappa=" +
                                         std::to_string(kappa));
    }
    return p.q / den;
}

/// xi at nu = 0 (real arithmetic):  q / (4 kappa^2 - a).
inline double xi0(int kappa, const mathieu_params& p) {
    const double den = 4.0 * double(kappa) * double(kappa) - p.a;
    if (std::abs(den) <= pole_eps) {
        throw near_pole_error(kappa, "xi0: 4k^2 - a within guard band at kappa=" +
                                         std::to_string(kappa));
    }
    return p.q / den;
}

/// Product of adjacent nu = 0 couplings:
///   alpha_i = xi0_i xi0_{i-1} = q^2 / ((4 i^2 - a)(4 (i-1)^2 - a)),  i >= 1.
inline double alpha(int i, const mathieu_params& p) {
    return xi0(i, p) * xi0(i - 1, p);
}

/// beta_i = 1 - alpha_i.
inline double beta(int i, const mathieu_params& p) {
    return 1.0 - alpha(i, p);
}

/// An upper bound on a discarded coupling tail.
struct tail_bound {
    int order = 0;      ///< truncation order n the bound was computed for
    double value = 0.0; ///< bound on sum_{|kappa| > n} |xi_{2kappa}(nu)|
};

namespace detail {

/// Integral remainder  |q| * int_{t0}^inf dt / (t^2 - A),  valid for t0 > sqrt(A).
inline double xi_tail_integral(double abs_q, double t0, double A) {
    if (A > 0.0) {
        const double r = std::sqrt(A);
        return abs_q / (2.0 * r) * std::log((t0 + r) / (t0 - r));
    }
    return abs_q / t0;
}

} // namespace detail

/// Upper bound on the discarded coupling mass  sum_{|kappa| > n} |xi_{2kappa}(nu)|
/// for real nu.  The summand is eventually dominated by the convex decreasing
/// envelope |q| / ((2k - |nu|)^2 - max(a,0)), whose midpoint-rule integral
/// majorizes the lattice sum; indices below the envelope's validity threshold
/// are summed exactly.  The result is non-increasing in n.
inline tail_bound tail_trace_bound(int n, double nu, const mathieu_params& p) {
    if (n < 1) throw index_out_of_validity_error("tail_trace_bound: n must be >= 1");
    if (p.q == 0.0) return {n, 0.0};

    const double npr = std::abs(nu);
    const double A = std::max(p.a, 0.0);
    const double root_a = std::sqrt(A);
    // Smallest N with 2N + 1 - |nu| >= sqrt(A) + 1.
    const int threshold = std::max(n, (int)std::ceil((root_a + npr) / 2.0));

    double exact = 0.0;
    for (int kappa = n + 1; kappa <= threshold; ++kappa) {
        const double dplus = (2.0 * kappa - npr) * (2.0 * kappa - npr) - p.a;
        const double dminus = (2.0 * kappa + npr) * (2.0 * kappa + npr) - p.a;
        if (std::abs(dplus) <= pole_eps || std::abs(dminus) <= pole_eps) {
            throw near_pole_error(kappa, "tail_trace_bound: pole beyond truncation order");
        }
        exact += std::abs(p.q) / std::abs(dplus) + std::abs(p.q) / std::abs(dminus);
    }

    const double t0 = 2.0 * threshold + 1.0 - npr;
    return {n, exact + detail::xi_tail_integral(std::abs(p.q), t0, A)};
}

/// Upper bound on  sum_{i > n} |alpha_i|  (used for truncation-error
/// estimates of the determinant series).  Exact partial sums below the
/// quartic-envelope threshold, then  sum_{i>m} q^2 / (4 (i-1)^4)  bounded by
/// its integral remainder.
inline double alpha_tail_bound(int n, const mathieu_params& p) {
    if (n < 1) throw index_out_of_validity_error("alpha_tail_bound: n must be >= 1");
    if (p.q == 0.0) return 0.0;

    // 4 (i-1)^2 >= 2 |a| makes both denominator factors >= half their
    // unshifted size.
    const int threshold = std::max(n, 1 + (int)std::ceil(std::sqrt(std::abs(p.a) / 2.0)));

    double exact = 0.0;
    for (int i = n + 1; i <= threshold; ++i) exact += std::abs(alpha(i, p));

    const double m = double(threshold);
    const double q2 = p.q * p.q;
    return exact + 0.25 * q2 * (1.0 / (m * m * m * m) + 1.0 / (3.0 * m * m * m));
}

} // namespace hillwave
