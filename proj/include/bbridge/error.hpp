#pragma once

#include <stdexcept>
#include <string>

namespace bbridge {

/// Argument outside the documented domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Argument too close to a pole of the Gamma function.
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Series or iteration hit its term cap before meeting its stop rule.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, int terms, double last_term)
        : std::runtime_error(what), terms_(terms), last_term_(last_term) {}

    int terms() const noexcept { return terms_; }
    double last_term() const noexcept { return last_term_; }

private:
    int terms_;
    double last_term_;
};

/// Adaptive quadrature exhausted its subdivision budget.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double value, double err_est)
        : std::runtime_error(what), value_(value), err_est_(err_est) {}

    double value() const noexcept { return value_; }
    double err_est() const noexcept { return err_est_; }

private:
    double value_;
    double err_est_;
};

}  // namespace bbridge
