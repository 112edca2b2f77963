#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "fracopt/fractional_order.hpp"

namespace fracopt {

using ScalarFunction = std::function<double(double)>;

/// Real polynomial, coefficients stored highest degree first.
class Polynomial {
public:
    /// Leading zeros are stripped; an empty list is the zero polynomial.
    explicit Polynomial(std::vector<double> coefficients);

    /// (u - c)^2
    static Polynomial shifted_square(double c);

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<double>& coefficients() const noexcept { return coeffs_; }

    double operator()(double u) const;
    Polynomial derivative() const;

    /// Coefficients of the same polynomial in powers of (u - a), lowest power
    /// first: p(u) = sum_k out[k] (u - a)^k.
    std::vector<double> taylor_coefficients(double a) const;

    /// p', p'', ... up to the requested order; orders above the degree are the
    /// zero function.
    std::vector<ScalarFunction> derivative_functions(int count) const;

private:
    std::vector<double> coeffs_;
};

/// Lower limit and memory length of a fractional operator plus the
/// Grünwald–Letnikov mesh width.
struct MemoryWindow {
    double lower_limit = 0.0;
    /// Infinity keeps the lower limit fixed.
    double memory_length = std::numeric_limits<double>::infinity();
    double step = 1e-5;

    void validate() const;

    /// max(lower_limit, u - memory_length)
    double effective_lower_limit(double u) const;
};

/// Grünwald–Letnikov derivative of f at u over the window, with
/// N = ceil((u - a_eff) / h) backward differences. The mesh is shrunk to
/// (u - a_eff) / N so that the last node sits exactly on a_eff.
double gl_derivative(const ScalarFunction& f, FractionalOrder alpha, double u,
                     const MemoryWindow& window);

/// Closed-form Caputo derivative with lower limit a, term by term on the
/// expansion of p about a.
double caputo_poly_derivative(const Polynomial& p, FractionalOrder alpha, double u, double a);

/// Closed-form Riemann–Liouville derivative with lower limit a.
double rl_poly_derivative(const Polynomial& p, FractionalOrder alpha, double u, double a);

/// Truncated Caputo Taylor expansion in derivatives evaluated at u:
///   1/Gamma(1-alpha) sum_{k=1}^{K} f^(k)(u) / (k-1)! (-1)^(k-1) (u-a)^(k-alpha) / (k-alpha).
/// derivatives[k-1] is f^(k); truncation K may not exceed derivatives.size().
double caputo_taylor_series(const std::vector<ScalarFunction>& derivatives, FractionalOrder alpha,
                            double u, double a, int truncation);

/// Real roots (ascending) of the bracket left after factoring (u)^(-alpha)
/// out of the Riemann–Liouville derivative of (u - c)^2 with lower limit 0:
///   Gamma(3)/Gamma(3-alpha) u^2 - 2c Gamma(2)/Gamma(2-alpha) u + c^2 Gamma(1)/Gamma(1-alpha).
/// Empty when the discriminant is negative.
std::vector<double> rl_quadratic_bracket_roots(double c, FractionalOrder alpha);

}  // namespace fracopt
