#pragma once

#include <stdexcept>
#include <string>

namespace levylmm {

/// Base class for all numerical-domain errors raised by the library.
/// The CLI maps these to a dedicated exit code.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A requested moment of the jump measure does not exist (integral diverges).
class DivergentMomentError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A state with 1 + delta_j x_j = 0 was passed to an analytic formula.
class SingularStateError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A derivative container was queried beyond the order it carries.
class OrderBudgetError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Spot derivatives of the log-normal kernel requested at (numerically) zero variance.
class DegenerateVarianceError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A price handed to the implied-volatility solver violates arbitrage bounds.
class PriceBoundsError : public DomainError {
public:
    using DomainError::DomainError;
};

} // namespace levylmm
