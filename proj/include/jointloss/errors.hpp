#pragma once

#include <stdexcept>
#include <string>

namespace jointloss {

/// Input outside the mathematical domain of an operation (nonpositive face
/// value, z <= 0, invalid correlation level, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An adaptive integration or iterative solve did not reach its tolerance.
/// Carries the best estimate and its error bound.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_estimate, double error_bound)
        : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double best_estimate_;
    double error_bound_;
};

/// Tensor-product quadrature requested for more common factors than supported.
class UnsupportedDimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Conditional loss covariance not invertible at a quadrature node.
class SingularCovarianceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Correlation requested where a loss variance vanishes.
class UndefinedCorrelationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Likelihood profile without an interior maximum that can be trusted.
class InconclusiveFitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sampler refused a request (memory budget, non-integral N for the
/// explicit Wishart ensemble).
class SamplerLimitError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace jointloss
