#pragma once

#include "fracopt/fractional_order.hpp"

namespace fracopt {

/// Controls for the Mittag-Leffler evaluator.
struct MlSeriesConfig {
    double term_tolerance = 1e-15;
    int max_terms = 10000;
    /// |z| above which the power series is not attempted.
    double argument_switch_radius = 50.0;

    void validate() const;
};

/// Absolute accuracy every accepted Mittag-Leffler value is held to.
inline constexpr double kMittagLefflerAccuracy = 1e-10;

/// Euler gamma function. Throws DomainError at the poles 0, -1, -2, ...
double gamma(double x);

/// 1 / Gamma(x), continued by zero at the poles.
double reciprocal_gamma(double x);

/// Two-parameter Mittag-Leffler function
///   E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta)
/// for real z.
///
/// The power series is used whenever |z| is within the configured radius and
/// its estimated cancellation error stays below kMittagLefflerAccuracy. For
/// 0 < alpha < 1, beta = 1 and z < 0 the value is otherwise taken from the
/// Laplace-type integral of the completely monotone kernel. Anything else is
/// refused with an EvaluationError carrying the achieved error estimate.
double mittag_leffler(FractionalOrder alpha, double beta, double z,
                      const MlSeriesConfig& cfg = {});

}  // namespace fracopt
