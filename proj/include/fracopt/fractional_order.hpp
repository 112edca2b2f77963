#pragma once

#include <cmath>
#include <string>

#include "fracopt/errors.hpp"

namespace fracopt {

/// Order of a fractional derivative. Any finite nonnegative real is
/// representable; individual operations narrow the admissible range
/// (the ODE solver accepts (0, 2], the Mittag-Leffler function alpha > 0).
class FractionalOrder {
public:
    explicit FractionalOrder(double alpha) : alpha_(alpha) {
        if (!std::isfinite(alpha) || alpha < 0.0) {
            throw DomainError("fractional order must be finite and >= 0, got " +
                              std::to_string(alpha));
        }
    }

    double value() const noexcept { return alpha_; }

    /// Number of integer-order initial conditions a Caputo problem of this
    /// order needs.
    int initial_conditions() const noexcept {
        return static_cast<int>(std::ceil(alpha_));
    }

    bool is_integer() const noexcept { return alpha_ == std::floor(alpha_); }

    friend bool operator==(FractionalOrder, FractionalOrder) = default;

private:
    double alpha_;
};

}  // namespace fracopt
