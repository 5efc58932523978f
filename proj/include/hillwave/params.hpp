#pragma once

#include <cmath>
#include <complex>

namespace hillwave {

/// Guard band around coupling-coefficient poles (2kappa - nu)^2 = a.
inline constexpr double pole_eps = 1e-9;

/// Smallest |b_i| accepted as a divisor in the explicit recursion solver.
inline constexpr double b_floor_eps = 1e-12;

/// Parameters of the wave equation psi'' + (a - 2 q cos 2z) psi = 0.
struct mathieu_params {
    double a = 0.0; ///< characteristic parameter (stiffness offset)
    double q = 0.0; ///< modulation depth
};

enum class stability_kind {
    stable,       ///< bounded quasi-periodic solutions, exponent real
    unstable_gap, ///< exponentially growing solutions, exponent complex
};

/// Floquet characteristic exponent, reduced to the canonical branch:
/// re in [0, 1], im >= 0.  A stable point has im == 0; inside a gap
/// im > 0 and re is pinned to 0 or 1 (which one alternates between
/// consecutive gaps).
struct characteristic_exponent {
    double re = 0.0;
    double im = 0.0;
    stability_kind stability = stability_kind::stable;

    std::complex<double> value() const { return {re, im}; }
};

/// Fold a real exponent into the canonical interval [0, 1].  Members of the
/// family {±nu + 2k : k integer} all map to the same representative.
inline double canonical_real_exponent(double nu) {
    double t = std::fmod(nu, 2.0);
    if (t < 0.0) t += 2.0;
    return (t > 1.0) ? 2.0 - t : t;
}

} // namespace hillwave
