#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "hill_determinant.hpp"
#include "params.hpp"

namespace hillwave {

/// Variable-coefficient third-order linear recursion
///     u_i = a[i] u_{i-1} + b[i] u_{i-2} + c[i] u_{i-3},   i >= 3.
/// Coefficient vectors are indexed directly by i; entries 0..2 are unused.
/// Every b[i] that ever appears as a divisor must stay away from zero
/// (|b[i]| >= b_floor_eps), enforced at the point of division.
struct recursion_system {
    std::vector<double> a, b, c;
};

namespace detail {

inline void require_coeff_range(const recursion_system& sys, long lo, long hi,
                                const char* who) {
    const long size = static_cast<long>(
        std::min({sys.a.size(), sys.b.size(), sys.c.size()}));
    if (lo < 3 || hi >= size)
        throw index_out_of_validity_error(
            std::string(who) + ": coefficient indices [" + std::to_string(lo) +
            ", " + std::to_string(hi) + "] outside the defined range [3, " +
            std::to_string(size - 1) + "]");
}

inline double checked_b(const recursion_system& sys, long i) {
    const double b = sys.b[static_cast<std::size_t>(i)];
    if (std::abs(b) < b_floor_eps)
        throw degenerate_b_error(i, "divisor b[" + std::to_string(i) +
                                        "] = " + std::to_string(b) +
                                        " below the degeneracy floor");
    return b;
}

} // namespace detail

/// Literal iteration u_3..u_k; returns the whole trajectory indexed absolutely.
inline std::vector<double> iterate_trajectory(const recursion_system& sys,
                                              double u0, double u1, double u2,
                                              long k) {
    if (k < 2)
        throw index_out_of_validity_error("iterate_trajectory: k must be >= 2");
    if (k >= 3) detail::require_coeff_range(sys, 3, k, "iterate_trajectory");
    std::vector<double> u(static_cast<std::size_t>(k) + 1);
    u[0] = u0;
    u[1] = u1;
    u[2] = u2;
    for (long i = 3; i <= k; ++i)
        u[i] = sys.a[i] * u[i - 1] + sys.b[i] * u[i - 2] + sys.c[i] * u[i - 3];
    return u;
}

/// Ground-truth value of u_k by direct iteration from u_0, u_1, u_2.
inline double direct_iterate(const recursion_system& sys, double u0, double u1,
                             double u2, long k) {
    if (k < 3) throw index_out_of_validity_error("direct_iterate: k must be >= 3");
    return iterate_trajectory(sys, u0, u1, u2, k).back();
}

/// A span-n representation of u_k over earlier trajectory values:
///     u_k = sum_{j=1}^{span-1} g[j] u_{k-j}  +  G u_{k-span}.
/// For span >= 4 the youngest slot is structurally empty (g[span-1] == 0): each
/// elimination removes the far term and never reintroduces its neighbor.  The
/// span-3 base form is the recursion itself: g[1] = a_k, g[2] = b_k, G = c_k.
struct sum_form {
    long k = 0;
    long span = 0;
    std::vector<double> g; // g[j] multiplies u_{k-j}; g[0] unused; size == span
    double G = 0.0;        // multiplies u_{k-span}

    /// Evaluate against an absolute trajectory (u[i] = u_i); must cover
    /// indices k-span .. k-1.
    double evaluate(const std::vector<double>& u) const {
        double s = G * u[static_cast<std::size_t>(k - span)];
        for (long j = span - 1; j >= 1; --j)
            s += g[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(k - j)];
        return s;
    }
};

/// The recursion at index k, packaged as the span-3 sum form.
inline sum_form base_form(const recursion_system& sys, long k) {
    detail::require_coeff_range(sys, k, k, "base_form");
    sum_form f;
    f.k = k;
    f.span = 3;
    f.g = {0.0, sys.a[static_cast<std::size_t>(k)], sys.b[static_cast<std::size_t>(k)]};
    f.G = sys.c[static_cast<std::size_t>(k)];
    return f;
}

/// One elimination step span n -> n+1: remove u_{k-n} by solving the recursion
/// written at index m = k-n+2 for its middle term,
///     u_{k-n} = (u_m - a_m u_{m-1} - c_m u_{m-3}) / b_m,
/// and substituting.  Slot updates: g[n-2] += G/b_m, g[n-1] -= G a_m / b_m,
/// new far coefficient G' = -G c_m / b_m; slot n is created empty.
inline void extend_sum_inplace(sum_form& s, const recursion_system& sys) {
    const long n = s.span, m = s.k - n + 2;
    detail::require_coeff_range(sys, m, m, "extend_sum");
    const double t = s.G / detail::checked_b(sys, m);
    s.g[static_cast<std::size_t>(n - 2)] += t;
    s.g[static_cast<std::size_t>(n - 1)] -= t * sys.a[static_cast<std::size_t>(m)];
    s.g.push_back(0.0);
    s.G = -t * sys.c[static_cast<std::size_t>(m)];
    s.span = n + 1;
}

inline sum_form extend_sum(const sum_form& s, const recursion_system& sys) {
    sum_form out = s;
    extend_sum_inplace(out, sys);
    return out;
}

namespace detail {

inline sum_form build_span_form(const recursion_system& sys, long k, long span) {
    sum_form f = base_form(sys, k);
    while (f.span < span) extend_sum_inplace(f, sys);
    return f;
}

} // namespace detail

/// Closed form of the far coefficient G of the span-n form anchored at k:
///     G_n = c_k * prod_{t=1}^{n-3} (-c_{k-t} / b_{k-t}),   n >= 3.
/// Derived by unrolling the first-order recursion G' = -G c_m / b_m along the
/// extension chain (divisor index m runs k-1 down to k-n+3).
inline double big_g_closed_form(long n, long k, const recursion_system& sys) {
    if (n < 3)
        throw index_out_of_validity_error("big_g_closed_form: span must be >= 3");
    detail::require_coeff_range(sys, k - (n - 3), k, "big_g_closed_form");
    double G = sys.c[static_cast<std::size_t>(k)];
    for (long t = 1; t <= n - 3; ++t)
        G *= -sys.c[static_cast<std::size_t>(k - t)] / detail::checked_b(sys, k - t);
    return G;
}

/// Closed form of the coefficient g[j] of u_{k-j} inside the span-n form
/// anchored at k.  Each slot j receives exactly two contributions after its
/// creation — "-G_{j+1} a_{k-j+1}/b_{k-j+1}" when the eliminated far term
/// passes it, then "+G_{j+2}/b_{k-j}" one step later — after which it is
/// stable.  Case analysis over how many of those updates the span-n form has
/// already performed:
///   j <= n-3          both updates applied (stable value),
///   j == n-2          only the first update applied,
///   j == n-1          none (slot empty for n >= 4; equal to b_k at n == 3).
inline double g_closed_form(long n, long k, long j, const recursion_system& sys) {
    if (n < 3 || j < 1 || j > n - 1)
        throw index_out_of_validity_error(
            "g_closed_form: slot j = " + std::to_string(j) +
            " invalid for span n = " + std::to_string(n));
    const auto a_at = [&](long i) { return sys.a[static_cast<std::size_t>(i)]; };
    const auto b_at = [&](long i) { return sys.b[static_cast<std::size_t>(i)]; };
    const auto c_at = [&](long i) { return sys.c[static_cast<std::size_t>(i)]; };

    if (j == n - 1) {
        detail::require_coeff_range(sys, k, k, "g_closed_form");
        return (n == 3) ? b_at(k) : 0.0;
    }
    if (j == n - 2) {
        if (n == 3) {
            detail::require_coeff_range(sys, k, k, "g_closed_form");
            return a_at(k);
        }
        if (n == 4) {
            detail::require_coeff_range(sys, k - 1, k, "g_closed_form");
            return b_at(k) - c_at(k) * a_at(k - 1) / detail::checked_b(sys, k - 1);
        }
        const long i = k - n + 3;
        detail::require_coeff_range(sys, i, k, "g_closed_form");
        return -big_g_closed_form(n - 1, k, sys) * a_at(i) / detail::checked_b(sys, i);
    }
    // stable branch j <= n-3
    if (j == 1) {
        detail::require_coeff_range(sys, k - 1, k, "g_closed_form");
        return a_at(k) + c_at(k) / detail::checked_b(sys, k - 1);
    }
    if (j == 2) {
        detail::require_coeff_range(sys, k - 2, k, "g_closed_form");
        return b_at(k) - c_at(k) * a_at(k - 1) / detail::checked_b(sys, k - 1) +
               big_g_closed_form(4, k, sys) / detail::checked_b(sys, k - 2);
    }
    detail::require_coeff_range(sys, k - j, k, "g_closed_form");
    return -big_g_closed_form(j + 1, k, sys) * a_at(k - j + 1) /
               detail::checked_b(sys, k - j + 1) +
           big_g_closed_form(j + 2, k, sys) / detail::checked_b(sys, k - j);
}

/// A chain of p strictly increasing jumps 0 = mu_1 < nu_1 = mu_2 < ... < nu_p = ell.
struct jump_sequence {
    std::vector<std::pair<int, int>> pairs;

    bool operator==(const jump_sequence& o) const { return pairs == o.pairs; }
};

/// All chains 0 -> ell with exactly p jumps, in lexicographic order of their
/// interior breakpoint sets; the count is C(ell-1, p-1).  Results are memoized
/// (guarded by a mutex) and the enumeration is capped at ell <= 24.
inline std::vector<jump_sequence> enumerate_jumps(int ell, int p) {
    if (ell < 1 || p < 1 || p > ell)
        throw index_out_of_validity_error("enumerate_jumps: need 1 <= p <= ell");
    if (ell > 24)
        throw index_out_of_validity_error("enumerate_jumps: capped at ell <= 24");

    static std::map<std::pair<int, int>, std::vector<jump_sequence>> memo;
    static std::mutex memo_mutex;
    std::lock_guard<std::mutex> lock(memo_mutex);
    if (auto it = memo.find({ell, p}); it != memo.end()) return it->second;

    std::vector<jump_sequence> out;
    std::vector<int> br(static_cast<std::size_t>(p) - 1);
    for (int i = 0; i < p - 1; ++i) br[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
        jump_sequence js;
        int prev = 0;
        for (int v : br) {
            js.pairs.emplace_back(prev, v);
            prev = v;
        }
        js.pairs.emplace_back(prev, ell);
        out.push_back(std::move(js));

        // advance the combination {br} within {1..ell-1}
        int i = p - 2;
        while (i >= 0 && br[static_cast<std::size_t>(i)] == ell - 1 - (p - 2 - i)) --i;
        if (i < 0) break;
        ++br[static_cast<std::size_t>(i)];
        for (int t = i + 1; t < p - 1; ++t)
            br[static_cast<std::size_t>(t)] = br[static_cast<std::size_t>(t - 1)] + 1;
    }
    memo.emplace(std::make_pair(ell, p), out);
    return out;
}

/// Sum over all p-jump chains 0 -> ell of the product of stable coefficients
///     prod over pairs (mu, nu) of g_{n-mu}^{k-mu}[nu - mu].
/// Every factor lands in the stable branch because valid chains satisfy
/// nu <= ell <= n-3, so (nu - mu) <= (n - mu) - 3.
inline double p_sum(int ell, int p, long n, long k, const recursion_system& sys) {
    double total = 0.0;
    for (const auto& js : enumerate_jumps(ell, p)) {
        double prod = 1.0;
        for (const auto& [mu, nuv] : js.pairs)
            prod *= g_closed_form(n - mu, k - mu, nuv - mu, sys);
        total += prod;
    }
    return total;
}

/// Result of ell leading-term eliminations applied to the span-n form:
///     u_k = sum_{j=ell+1}^{span-2} gamma[j] u_{k-j}  +  Gamma u_{k-span}.
struct gamma_form {
    long k = 0;
    long span = 0;
    long ell = 0;
    std::vector<double> gamma; // gamma[j] multiplies u_{k-j}; live j = ell+1..span-2
    double Gamma = 0.0;        // multiplies u_{k-span}

    double evaluate(const std::vector<double>& u) const {
        double s = Gamma * u[static_cast<std::size_t>(k - span)];
        for (long j = span - 2; j >= ell + 1; --j)
            s += gamma[static_cast<std::size_t>(j)] *
                 u[static_cast<std::size_t>(k - j)];
        return s;
    }
};

/// The elimination path (ground truth): start from the span-n form anchored at
/// k and repeatedly remove the leading term u_{k-sigma-1} by substituting the
/// span-(n-sigma-1) form anchored at k-sigma-1 (every substituted form ends on
/// the same far term u_{k-n}).  Runs sigma = 0..ell-1; requires ell <= n-4 so
/// at least two interior slots survive.
inline gamma_form eliminate_leading(const recursion_system& sys, long n, long k,
                                    long ell) {
    if (n < 4)
        throw index_out_of_validity_error("eliminate_leading: span must be >= 4");
    if (ell < 0 || ell > n - 4)
        throw index_out_of_validity_error(
            "eliminate_leading: need 0 <= ell <= span - 4");
    const sum_form f0 = detail::build_span_form(sys, k, n);
    gamma_form g;
    g.k = k;
    g.span = n;
    g.ell = 0;
    g.gamma = f0.g;
    g.Gamma = f0.G;
    for (long sigma = 0; sigma < ell; ++sigma) {
        const sum_form sub =
            detail::build_span_form(sys, k - sigma - 1, n - sigma - 1);
        const double lead = g.gamma[static_cast<std::size_t>(sigma + 1)];
        g.gamma[static_cast<std::size_t>(sigma + 1)] = 0.0;
        for (long j = sigma + 2; j <= n - 2; ++j)
            g.gamma[static_cast<std::size_t>(j)] +=
                lead * sub.g[static_cast<std::size_t>(j - sigma - 1)];
        g.Gamma += lead * sub.G;
        g.ell = sigma + 1;
    }
    return g;
}

/// gamma coefficients after ell eliminations, computed along BOTH paths —
/// the first-order elimination recursions and the jump-sum closed forms
///     lead_sigma = sum_{p=1}^{sigma+1} p_sum(sigma+1, p)        (leading slot)
///     gamma[j]   = g_n^k[j] + sum_sigma lead_sigma * g_{n-sigma-1}^{k-sigma-1}[j-sigma-1]
///     Gamma      = G_n^k    + sum_sigma lead_sigma * G_{n-sigma-1}^{k-sigma-1}
/// — with the maximum pointwise disagreement reported.  The elimination value
/// is the one returned.  Cost of the closed-form path grows like 2^ell; meant
/// for verification at moderate ell, not for the production solve path.
struct gamma_result {
    gamma_form form;
    double cross_path_deviation = 0.0;
};

inline gamma_result gamma_coeffs(long n, long k, long ell,
                                 const recursion_system& sys) {
    gamma_result r;
    r.form = eliminate_leading(sys, n, k, ell);

    std::vector<double> lead(static_cast<std::size_t>(ell) + 1, 0.0);
    for (long sigma = 0; sigma <= ell; ++sigma) {
        double s = 0.0;
        for (int p = 1; p <= sigma + 1; ++p)
            s += p_sum(static_cast<int>(sigma) + 1, p, n, k, sys);
        lead[static_cast<std::size_t>(sigma)] = s;
    }

    double dev = 0.0;
    for (long j = ell + 1; j <= n - 2; ++j) {
        double closed = g_closed_form(n, k, j, sys);
        for (long sigma = 0; sigma <= ell - 1; ++sigma)
            closed += lead[static_cast<std::size_t>(sigma)] *
                      g_closed_form(n - sigma - 1, k - sigma - 1, j - sigma - 1, sys);
        dev = std::max(dev,
                       std::abs(closed - r.form.gamma[static_cast<std::size_t>(j)]));
    }
    dev = std::max(dev, std::abs(lead[static_cast<std::size_t>(ell)] -
                                 r.form.gamma[static_cast<std::size_t>(ell + 1)]));

    double closed_far = big_g_closed_form(n, k, sys);
    for (long sigma = 0; sigma <= ell - 1; ++sigma)
        closed_far += lead[static_cast<std::size_t>(sigma)] *
                      big_g_closed_form(n - sigma - 1, k - sigma - 1, sys);
    dev = std::max(dev, std::abs(closed_far - r.form.Gamma));

    r.cross_path_deviation = dev;
    return r;
}

/// Explicit solution of the recursion: u_k from only the three trajectory
/// values u_{k-(n-3)}, u_{k-(n-2)}, u_{k-n}, via the fully eliminated
/// (ell = n-4) three-term identity
///     u_k = gamma[n-3] u_{k-(n-3)} + gamma[n-2] u_{k-(n-2)} + Gamma u_{k-n}.
/// Validity window: 7 <= n <= k-3.
inline double solve_uk(const recursion_system& sys, double u_k_minus_n3,
                       double u_k_minus_n2, double u_k_minus_n, long k, long n) {
    if (n < 7 || n > k - 3)
        throw index_out_of_validity_error("solve_uk: need 7 <= n <= k-3, got n = " +
                                          std::to_string(n) +
                                          ", k = " + std::to_string(k));
    const gamma_form g = eliminate_leading(sys, n, k, n - 4);
    return g.gamma[static_cast<std::size_t>(n - 3)] * u_k_minus_n3 +
           g.gamma[static_cast<std::size_t>(n - 2)] * u_k_minus_n2 +
           g.Gamma * u_k_minus_n;
}

/// The determinant sequence as an instance of the generic machinery:
/// coefficients (a_i, b_i, c_i) = (beta_i, -alpha_i beta_i, alpha_i alpha_{i-1}^2),
/// seeds taken from the direct stepper, and Delta_k reassembled through
/// solve_uk.  Degenerate when some divisor beta_i vanishes.  For q = 0 every
/// truncation equals 1 exactly (all alpha vanish) and the machinery is skipped.
inline double delta_explicit(const mathieu_params& p, long k, long n) {
    if (n < 7 || n > k - 3)
        throw index_out_of_validity_error(
            "delta_explicit: need 7 <= n <= k-3, got n = " + std::to_string(n) +
            ", k = " + std::to_string(k));
    if (p.q == 0.0) return 1.0;

    delta_stepper st(p);
    while (static_cast<long>(st.deltas().size()) <= k - n + 3) st.advance();
    const std::vector<double>& d = st.deltas();

    recursion_system sys;
    sys.a.assign(static_cast<std::size_t>(k) + 1, 0.0);
    sys.b.assign(static_cast<std::size_t>(k) + 1, 0.0);
    sys.c.assign(static_cast<std::size_t>(k) + 1, 0.0);
    double alpha_prev = alpha(2, p);
    for (long i = 3; i <= k; ++i) {
        const double al = alpha(static_cast<int>(i), p);
        sys.a[static_cast<std::size_t>(i)] = 1.0 - al;
        sys.b[static_cast<std::size_t>(i)] = -al * (1.0 - al);
        sys.c[static_cast<std::size_t>(i)] = al * alpha_prev * alpha_prev;
        alpha_prev = al;
    }
    return solve_uk(sys, d[static_cast<std::size_t>(k - n + 3)],
                    d[static_cast<std::size_t>(k - n + 2)],
                    d[static_cast<std::size_t>(k - n)], k, n);
}

} // namespace hillwave
