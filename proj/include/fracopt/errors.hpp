#pragma once

#include <stdexcept>
#include <string>

namespace fracopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (gamma poles,
/// evaluation points at or below a lower integration limit, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical evaluation could not reach its accuracy target.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}

    /// Best error estimate reached before giving up.
    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Invalid or incomplete configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An iteration or integration produced a nonfinite or runaway state.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double where)
        : Error(what), where_(where) {}

    /// Time (continuous methods) or iteration index (discrete methods).
    double where() const noexcept { return where_; }

private:
    double where_;
};

/// Adaptive step control collapsed.
class StiffnessError : public Error {
public:
    using Error::Error;
};

/// Coincident charges in the Thomson energy.
class SingularityError : public Error {
public:
    SingularityError(const std::string& what, int i, int j)
        : Error(what), i_(i), j_(j) {}
    int first() const noexcept { return i_; }
    int second() const noexcept { return j_; }

private:
    int i_;
    int j_;
};

/// Request outside the range where a result is established.
class ScopeError : public Error {
public:
    using Error::Error;
};

/// Rejection sampling ran out of attempts.
class RetryError : public Error {
public:
    using Error::Error;
};

}  // namespace fracopt
