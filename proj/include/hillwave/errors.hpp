#pragma once

#include <stdexcept>
#include <string>

namespace hillwave {

/// Base class for all numerical-domain failures raised by this library.
/// `code()` returns a stable machine-readable identifier (also used by the
/// CLI for structured error records and exit-code mapping).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what_arg) : std::runtime_error(what_arg) {}
    virtual const char* code() const noexcept = 0;
};

/// A coupling coefficient denominator (2kappa - nu)^2 - a fell within the
/// pole guard band.
class near_pole_error : public numeric_error {
public:
    near_pole_error(int kappa, const std::string& what_arg)
        : numeric_error(what_arg), kappa_(kappa) {}
    const char* code() const noexcept override { return "near_pole"; }
    int kappa() const noexcept { return kappa_; }

private:
    int kappa_;
};

/// An iterative computation exhausted its step budget before meeting the
/// requested tolerance.
class no_convergence_error : public numeric_error {
public:
    no_convergence_error(int n_max, const std::string& what_arg)
        : numeric_error(what_arg), n_max_(n_max) {}
    const char* code() const noexcept override { return "no_convergence"; }
    int n_max() const noexcept { return n_max_; }

private:
    int n_max_;
};

/// A second-lag coefficient b_i used as a divisor is (numerically) zero.
class degenerate_b_error : public numeric_error {
public:
    degenerate_b_error(long index, const std::string& what_arg)
        : numeric_error(what_arg), index_(index) {}
    const char* code() const noexcept override { return "degenerate_b"; }
    long index() const noexcept { return index_; }

private:
    long index_;
};

/// An index or span lies outside the validity range of the requested
/// operation.
class index_out_of_validity_error : public numeric_error {
public:
    explicit index_out_of_validity_error(const std::string& what_arg)
        : numeric_error(what_arg) {}
    const char* code() const noexcept override { return "index_out_of_validity"; }
};

/// Inverse iteration converged but the residual shows the matrix is not
/// close to singular (the supplied exponent does not solve the system).
class not_near_singular_error : public numeric_error {
public:
    not_near_singular_error(double residual, const std::string& what_arg)
        : numeric_error(what_arg), residual_(residual) {}
    const char* code() const noexcept override { return "not_near_singular"; }
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// The adaptive integrator could not take an acceptable step (step size
/// underflow or step budget exhausted).
class step_failure_error : public numeric_error {
public:
    explicit step_failure_error(const std::string& what_arg)
        : numeric_error(what_arg) {}
    const char* code() const noexcept override { return "step_failure"; }
};

/// A root bracketing request was malformed (e.g. an empty or reversed
/// search window).
class no_bracket_error : public numeric_error {
public:
    explicit no_bracket_error(const std::string& what_arg)
        : numeric_error(what_arg) {}
    const char* code() const noexcept override { return "no_bracket"; }
};

} // namespace hillwave
