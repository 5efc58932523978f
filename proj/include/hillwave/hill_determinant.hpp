#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "coefficients.hpp"
#include "errors.hpp"
#include "params.hpp"
#include "tridiagonal.hpp"

namespace hillwave {

/// Truncated normalized system matrix of order n: rows are indexed by
/// kappa = n, n-1, ..., -n (top to bottom), with unit diagonal and both
/// off-diagonal entries of row kappa equal to xi_{2kappa}(nu).
/// Dimension is 2n + 1.
inline tridiagonal<std::complex<double>> build_truncated(int n, std::complex<double> nu,
                                                         const mathieu_params& p) {
    if (n < 0) throw index_out_of_validity_error("build_truncated: n must be >= 0");
    const int dim = 2 * n + 1;
    tridiagonal<std::complex<double>> m;
    m.diag.assign(dim, std::complex<double>(1.0));
    m.sub.resize(dim - 1);
    m.sup.resize(dim - 1);
    for (int r = 0; r + 1 < dim; ++r) {
        m.sup[r] = xi(n - r, nu, p);       // row r, right neighbour
        m.sub[r] = xi(n - r - 1, nu, p);   // row r+1, left neighbour
    }
    // Top and bottom rows only have an inner neighbour; the boundary xi of
    // the bottom row (kappa = -n) is sub[dim-2], already set above.
    return m;
}

/// Real-arithmetic variant for real nu.
inline tridiagonal<double> build_truncated_real(int n, double nu, const mathieu_params& p) {
    if (n < 0) throw index_out_of_validity_error("build_truncated: n must be >= 0");
    auto xol = [&](int kappa) {
        const double den = (2.0 * kappa - nu) * (2.0 * kappa - nu) - p.a;
        if (std::abs(den) <= pole_eps)
            throw near_pole_error(kappa, "build_truncated: (2k-nu)^2 - a within guard band");
        return p.q / den;
    };
    const int dim = 2 * n + 1;
    tridiagonal<double> m;
    m.diag.assign(dim, 1.0);
    m.sub.resize(dim - 1);
    m.sup.resize(dim - 1);
    for (int r = 0; r + 1 < dim; ++r) {
        m.sup[r] = xol(n - r);
        m.sub[r] = xol(n - r - 1);
    }
    return m;
}

/// Truncated determinant Delta_n(a, nu) for real nu, by direct continuant.
inline double delta_general(const mathieu_params& p, double nu, int n) {
    if (p.q == 0.0) return 1.0;
    return det_direct(build_truncated_real(n, nu, p));
}

/// Incremental determinant series at nu = 0.
///
/// Index i is the truncation order (matrix dimension 2i + 1).  The series is
/// advanced by the division-free third-order step
///   Delta_i = beta_i Delta_{i-1} - alpha_i beta_i Delta_{i-2}
///             + alpha_i alpha_{i-1}^2 Delta_{i-3},      i >= 3,
/// with the corner-minor sequence Omega_i = Delta_{i-1} - alpha_i Omega_{i-1}
/// carried along so every step can be cross-checked against the Laplace
/// two-corner expansion
///   Delta_i = Delta_{i-1} - 2 alpha_i Omega_{i-1} + alpha_i^2 Delta_{i-2}.
/// Seeds Delta_0..Delta_2 and Omega_1, Omega_2 are evaluated as explicit
/// small determinants, so there is no ambiguity about where the recursions
/// start.  Each advance() performs one step: exactly one new alpha
/// evaluation and a constant number of arithmetic operations.
class delta_stepper {
public:
    explicit delta_stepper(const mathieu_params& p) : p_(p) {
        if (p_.q != 0.0) {
            const int kstar = (int)std::llround(std::sqrt(std::max(p_.a, 0.0)) / 2.0);
            for (int k = std::max(0, kstar - 1); k <= kstar + 1; ++k) {
                if (std::abs(4.0 * k * k - p_.a) <= pole_eps)
                    throw near_pole_error(k, "delta series: a within guard band of 4 k^2");
            }
        }
        deltas_.push_back(1.0); // Delta_0: the 1x1 matrix [1]
        omegas_.push_back(1.0); // Omega_0: empty minor
        if (p_.q == 0.0) {
            deltas_.push_back(1.0);
            omegas_.push_back(1.0);
            alpha_prev_ = 0.0;
            return;
        }
        const auto a1 = build_truncated_real(1, 0.0, p_);
        const auto a2 = build_truncated_real(2, 0.0, p_);
        deltas_.push_back(det_direct(a1));
        omegas_.push_back(det_direct(leading_minor(a1)));
        deltas_.push_back(det_direct(a2));
        omegas_.push_back(det_direct(leading_minor(a2)));
        alpha_prev_ = alpha(2, p_);
        ++alpha_evals_;
    }

    /// Compute the next Delta/Omega pair. O(1) work per call.
    void advance() {
        const int i = (int)deltas_.size(); // index being produced
        if (p_.q == 0.0) {
            deltas_.push_back(1.0);
            omegas_.push_back(1.0);
            return;
        }
        const double al = alpha(i, p_);
        ++alpha_evals_;
        const double be = 1.0 - al;
        const double d1 = deltas_[i - 1], d2 = deltas_[i - 2], d3 = deltas_[i - 3];
        const double third_order = be * d1 - al * be * d2 + al * alpha_prev_ * alpha_prev_ * d3;
        const double corner = d1 - 2.0 * al * omegas_[i - 1] + al * al * d2;
        path_disagreement_ = std::max(path_disagreement_, std::abs(third_order - corner));
        deltas_.push_back(third_order);
        omegas_.push_back(d1 - al * omegas_[i - 1]);
        alpha_prev_ = al;
    }

    const std::vector<double>& deltas() const { return deltas_; }
    const std::vector<double>& omegas() const { return omegas_; }
    double path_disagreement() const { return path_disagreement_; }
    long alpha_evals() const { return alpha_evals_; }
    const mathieu_params& params() const { return p_; }

private:
    mathieu_params p_;
    std::vector<double> deltas_;
    std::vector<double> omegas_;
    double alpha_prev_ = 0.0;
    double path_disagreement_ = 0.0;
    long alpha_evals_ = 0;
};

/// Result of running the determinant series to (attempted) convergence.
struct determinant_series {
    std::vector<double> deltas;  ///< deltas[i] = Delta_i, i = 0..last computed
    std::vector<double> omegas;  ///< omegas[i] = Omega_i
    bool converged = false;
    int converged_at = -1;       ///< first i with |Delta_i - Delta_{i-1}| below threshold
    double limit = 0.0;          ///< last computed Delta (the estimate of Delta(a, 0))
    double tail_estimate = 0.0;  ///< bound on the remaining change past the last index
    double recursion_residual = 0.0; ///< max disagreement of the two update paths
};

/// Run the nu = 0 determinant series until |Delta_i - Delta_{i-1}| drops
/// below tol * max(1, |Delta_i|), or n_max steps are taken.
inline determinant_series delta_series(const mathieu_params& p, int n_max = 200,
                                       double tol = 1e-12) {
    if (n_max < 1) throw index_out_of_validity_error("delta_series: n_max must be >= 1");
    delta_stepper stepper(p);
    determinant_series out;

    int stop = -1;
    {
        const auto& d = stepper.deltas();
        for (int i = 1; i < (int)d.size() && stop < 0; ++i) {
            if (i > n_max) break;
            if (std::abs(d[i] - d[i - 1]) < tol * std::max(1.0, std::abs(d[i]))) stop = i;
        }
    }
    while (stop < 0 && (int)stepper.deltas().size() <= n_max) {
        stepper.advance();
        const auto& d = stepper.deltas();
        const int i = (int)d.size() - 1;
        if (std::abs(d[i] - d[i - 1]) < tol * std::max(1.0, std::abs(d[i]))) stop = i;
    }

    out.deltas = stepper.deltas();
    out.omegas = stepper.omegas();
    out.recursion_residual = stepper.path_disagreement();
    out.converged = stop >= 0;
    out.converged_at = stop;
    out.limit = out.deltas.back();

    const int last = (int)out.deltas.size() - 1;
    if (p.q == 0.0) {
        out.tail_estimate = 0.0;
    } else {
        double mag = 1.0;
        for (double v : out.deltas) mag = std::max(mag, std::abs(v));
        for (double v : out.omegas) mag = std::max(mag, std::abs(v));
        const double envelope = 2.0 * mag + 1.0;
        const double s = alpha_tail_bound(std::max(last, 1), p);
        out.tail_estimate = envelope * s * (2.0 + s);
    }
    return out;
}

/// Converged value Delta(a, 0) used by the exponent formula.  Honors the
/// increment-based stop of delta_series; the internal step budget is raised
/// well past the default because an increment threshold of tol is reached
/// only around i ~ (q^2 / tol)^(1/4).
inline double delta_zero(const mathieu_params& p, double tol = 1e-12) {
    constexpr int hard_cap = 4096;
    const determinant_series s = delta_series(p, hard_cap, tol);
    if (!s.converged) {
        throw no_convergence_error(hard_cap, "delta_zero: increment " +
                                                 std::to_string(std::abs(
                                                     s.deltas.back() -
                                                     s.deltas[s.deltas.size() - 2])) +
                                                 " did not reach tolerance " +
                                                 std::to_string(tol));
    }
    return s.limit;
}

} // namespace hillwave
