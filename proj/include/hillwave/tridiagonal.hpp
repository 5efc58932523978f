#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "errors.hpp"

namespace hillwave {

/// Dense storage for a tridiagonal matrix.  `diag` has the matrix dimension,
/// `sub`/`sup` one entry less; sub[i] sits at (i+1, i), sup[i] at (i, i+1).
template <class T>
struct tridiagonal {
    std::vector<T> diag;
    std::vector<T> sub;
    std::vector<T> sup;

    std::size_t dim() const { return diag.size(); }
};

/// Leading principal minor: drop the last row and column.
template <class T>
tridiagonal<T> leading_minor(const tridiagonal<T>& m) {
    if (m.dim() == 0) return m;
    tridiagonal<T> r;
    r.diag.assign(m.diag.begin(), m.diag.end() - 1);
    if (!m.sub.empty()) {
        r.sub.assign(m.sub.begin(), m.sub.end() - 1);
        r.sup.assign(m.sup.begin(), m.sup.end() - 1);
    }
    return r;
}

/// Trailing principal minor: drop the first row and column.
template <class T>
tridiagonal<T> trailing_minor(const tridiagonal<T>& m) {
    if (m.dim() == 0) return m;
    tridiagonal<T> r;
    r.diag.assign(m.diag.begin() + 1, m.diag.end());
    if (!m.sub.empty()) {
        r.sub.assign(m.sub.begin() + 1, m.sub.end());
        r.sup.assign(m.sup.begin() + 1, m.sup.end());
    }
    return r;
}

/// Determinant by the three-term continuant
///   D_k = d_k D_{k-1} - sub_{k-1} sup_{k-1} D_{k-2}.
/// For real input each step carries a first-order rounding correction
/// (fma residuals), since long products of near-unity factors otherwise
/// accumulate error linearly with the dimension.
template <class T>
T det_direct(const tridiagonal<T>& m) {
    const std::size_t n = m.dim();
    T dm2 = T(1); // D_{k-2}
    T dm1 = n > 0 ? m.diag[0] : T(1);
    if (n <= 1) return dm1;

    if constexpr (std::is_same_v<T, double>) {
        double cm2 = 0.0, cm1 = 0.0; // rounding corrections for dm2/dm1
        for (std::size_t k = 1; k < n; ++k) {
            const double p = m.sub[k - 1] * m.sup[k - 1];
            const double perr = std::fma(m.sub[k - 1], m.sup[k - 1], -p);
            const double t1 = m.diag[k] * dm1;
            const double t1err = std::fma(m.diag[k], dm1, -t1);
            const double t2 = p * dm2;
            const double t2err = std::fma(p, dm2, -t2) + perr * dm2;
            const double next = t1 - t2;
            const double virt = next - t1;
            const double sub_err = (t1 - (next - virt)) + (-t2 - virt);
            const double cnext = sub_err + (t1err - t2err) + (m.diag[k] * cm1 - p * cm2);
            dm2 = dm1;
            cm2 = cm1;
            dm1 = next;
            cm1 = cnext;
        }
        return dm1 + cm1;
    } else {
        for (std::size_t k = 1; k < n; ++k) {
            const T next = m.diag[k] * dm1 - m.sub[k - 1] * m.sup[k - 1] * dm2;
            dm2 = dm1;
            dm1 = next;
        }
        return dm1;
    }
}

/// Solve m x = rhs by banded LU with partial pivoting (one fill-in
/// superdiagonal).  Intended for inverse iteration, where the matrix is
/// nearly singular: an exactly zero pivot is nudged to the smallest value
/// that keeps the solve finite.
template <class T>
std::vector<T> solve_tridiagonal(const tridiagonal<T>& m, std::vector<T> rhs) {
    const std::size_t n = m.dim();
    if (rhs.size() != n) throw index_out_of_validity_error("solve_tridiagonal: rhs size mismatch");
    if (n == 0) return rhs;

    std::vector<T> d = m.diag, e = m.sup, s = m.sub;
    std::vector<T> f(n > 2 ? n - 2 : 0, T(0)); // fill-in second superdiagonal

    double scale = 0.0;
    for (const T& v : d) scale = std::max(scale, std::abs(v));
    for (const T& v : e) scale = std::max(scale, std::abs(v));
    for (const T& v : s) scale = std::max(scale, std::abs(v));
    const double tiny = std::max(scale, 1.0) * 1e-300;

    for (std::size_t k = 0; k + 1 < n; ++k) {
        // Pivot between row k and row k+1.
        if (std::abs(s[k]) > std::abs(d[k])) {
            std::swap(d[k], s[k]); // new pivot row is the old row k+1
            T upper_k = e[k], upper_k1 = d[k + 1];
            d[k + 1] = upper_k;
            e[k] = upper_k1;
            if (k + 2 < n) {
                f[k] = e[k + 1];
                e[k + 1] = T(0);
            }
            std::swap(rhs[k], rhs[k + 1]);
        }
        if (std::abs(d[k]) < tiny) d[k] = T(tiny);
        const T mult = s[k] / d[k];
        d[k + 1] -= mult * e[k];
        if (k + 2 < n) e[k + 1] -= mult * f[k];
        rhs[k + 1] -= mult * rhs[k];
        s[k] = mult;
    }
    if (std::abs(d[n - 1]) < tiny) d[n - 1] = T(tiny);

    // Back substitution.
    std::vector<T> x(n);
    x[n - 1] = rhs[n - 1] / d[n - 1];
    if (n >= 2) x[n - 2] = (rhs[n - 2] - e[n - 2] * x[n - 1]) / d[n - 2];
    for (std::size_t k = n; k-- > 2;) {
        const std::size_t i = k - 2;
        T acc = rhs[i] - e[i] * x[i + 1];
        if (i < f.size()) acc -= f[i] * x[i + 2];
        x[i] = acc / d[i];
    }
    return x;
}

/// Matrix-vector product for residual checks.
template <class T>
std::vector<T> apply_tridiagonal(const tridiagonal<T>& m, const std::vector<T>& x) {
    const std::size_t n = m.dim();
    if (x.size() != n) throw index_out_of_validity_error("apply_tridiagonal: vector size mismatch");
    std::vector<T> y(n, T(0));
    for (std::size_t i = 0; i < n; ++i) {
        T acc = m.diag[i] * x[i];
        if (i > 0) acc += m.sub[i - 1] * x[i - 1];
        if (i + 1 < n) acc += m.sup[i] * x[i + 1];
        y[i] = acc;
    }
    return y;
}

} // namespace hillwave
