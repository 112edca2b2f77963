#include "fracopt/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracopt/errors.hpp"
#include "fracopt/specfun.hpp"

namespace fracopt {

namespace {

void require_above_limit(const char* op, double u, double a) {
    if (!(u > a)) {
        std::ostringstream os;
        os << op << ": evaluation point u = " << u << " must exceed the lower limit a = " << a;
        throw DomainError(os.str());
    }
}

double factorial(int k) { return std::tgamma(static_cast<double>(k) + 1.0); }

}  // namespace

Polynomial::Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
    auto first = std::find_if(coeffs_.begin(), coeffs_.end(), [](double c) { return c != 0.0; });
    coeffs_.erase(coeffs_.begin(), first);
    if (coeffs_.empty()) coeffs_.push_back(0.0);
}

Polynomial Polynomial::shifted_square(double c) { return Polynomial({1.0, -2.0 * c, c * c}); }

double Polynomial::operator()(double u) const {
    double acc = 0.0;
    for (double c : coeffs_) acc = acc * u + c;
    return acc;
}

Polynomial Polynomial::derivative() const {
    const int n = degree();
    if (n == 0) return Polynomial({0.0});
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) d.push_back(coeffs_[static_cast<std::size_t>(i)] * (n - i));
    return Polynomial(std::move(d));
}

std::vector<double> Polynomial::taylor_coefficients(double a) const {
    // Repeated synthetic division by (u - a).
    std::vector<double> b = coeffs_;
    const int n = degree();
    for (int pass = 0; pass < n; ++pass) {
        for (int j = 1; j <= n - pass; ++j) {
            b[static_cast<std::size_t>(j)] += a * b[static_cast<std::size_t>(j - 1)];
        }
    }
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = b[static_cast<std::size_t>(n - k)];
    return out;
}

std::vector<ScalarFunction> Polynomial::derivative_functions(int count) const {
    std::vector<ScalarFunction> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    Polynomial d = derivative();
    for (int k = 1; k <= count; ++k) {
        out.emplace_back([d](double u) { return d(u); });
        d = d.derivative();
    }
    return out;
}

void MemoryWindow::validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("MemoryWindow: step must be > 0");
    if (std::isnan(memory_length) || memory_length < 0.0) {
        throw ConfigError("MemoryWindow: memory_length must be >= 0");
    }
    if (std::isfinite(memory_length) && memory_length < step) {
        throw ConfigError("MemoryWindow: a finite memory_length must be >= step");
    }
    if (std::isnan(lower_limit)) throw ConfigError("MemoryWindow: lower_limit is NaN");
}

double MemoryWindow::effective_lower_limit(double u) const {
    if (std::isinf(memory_length)) return lower_limit;
    return std::max(lower_limit, u - memory_length);
}

double gl_derivative(const ScalarFunction& f, FractionalOrder alpha_order, double u,
                     const MemoryWindow& window) {
    window.validate();
    const double a = window.effective_lower_limit(u);
    require_above_limit("gl_derivative", u, a);
    const double alpha = alpha_order.value();
    if (alpha == 0.0) return f(u);

    const double span = u - a;
    const auto n = static_cast<long long>(std::ceil(span / window.step * (1.0 - 1e-12)));
    const long long terms = std::max<long long>(n, 1);
    const double h = span / static_cast<double>(terms);

    // (-1)^k binom(alpha, k) by the multiplicative recurrence.
    double weight = 1.0;
    double sum = 0.0;
    double comp = 0.0;
    for (long long k = 0; k <= terms; ++k) {
        if (k > 0) weight *= (static_cast<double>(k) - 1.0 - alpha) / static_cast<double>(k);
        const double x = (k == terms) ? a : u - static_cast<double>(k) * h;
        const double fx = f(x);
        if (!std::isfinite(fx)) {
            std::ostringstream os;
            os << "gl_derivative: nonfinite sample f(" << x << ")";
            throw EvaluationError(os.str(), fx);
        }
        const double term = weight * fx;
        const double t = sum + term;
        comp += (std::fabs(sum) >= std::fabs(term)) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return (sum + comp) / std::pow(h, alpha);
}

double caputo_poly_derivative(const Polynomial& p, FractionalOrder alpha_order, double u, double a) {
    require_above_limit("caputo_poly_derivative", u, a);
    const double alpha = alpha_order.value();
    if (alpha == 0.0) return p(u);
    const int m = alpha_order.initial_conditions();
    const std::vector<double> t = p.taylor_coefficients(a);
    const double x = u - a;
    double acc = 0.0;
    for (int k = m; k < static_cast<int>(t.size()); ++k) {
        const double c = t[static_cast<std::size_t>(k)];
        if (c == 0.0) continue;
        acc += c * factorial(k) * reciprocal_gamma(k + 1.0 - alpha) * std::pow(x, k - alpha);
    }
    return acc;
}

double rl_poly_derivative(const Polynomial& p, FractionalOrder alpha_order, double u, double a) {
    require_above_limit("rl_poly_derivative", u, a);
    const double alpha = alpha_order.value();
    if (alpha == 0.0) return p(u);
    const std::vector<double> t = p.taylor_coefficients(a);
    const double x = u - a;
    double acc = 0.0;
    for (int k = 0; k < static_cast<int>(t.size()); ++k) {
        const double c = t[static_cast<std::size_t>(k)];
        if (c == 0.0) continue;
        acc += c * factorial(k) * reciprocal_gamma(k + 1.0 - alpha) * std::pow(x, k - alpha);
    }
    return acc;
}

double caputo_taylor_series(const std::vector<ScalarFunction>& derivatives,
                            FractionalOrder alpha_order, double u, double a, int truncation) {
    const double alpha = alpha_order.value();
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("caputo_taylor_series: requires 0 < alpha < 1");
    }
    require_above_limit("caputo_taylor_series", u, a);
    if (truncation < 1 || truncation > static_cast<int>(derivatives.size())) {
        throw ConfigError("caputo_taylor_series: truncation must be in [1, derivatives.size()]");
    }
    const double x = u - a;
    double acc = 0.0;
    for (int k = 1; k <= truncation; ++k) {
        const double dk = derivatives[static_cast<std::size_t>(k - 1)](u);
        if (dk == 0.0) continue;
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        acc += dk / factorial(k - 1) * sign * std::pow(x, k - alpha) / (k - alpha);
    }
    return acc / std::tgamma(1.0 - alpha);
}

std::vector<double> rl_quadratic_bracket_roots(double c, FractionalOrder alpha_order) {
    const double alpha = alpha_order.value();
    const double qa = 2.0 * reciprocal_gamma(3.0 - alpha);
    const double qb = -2.0 * c * reciprocal_gamma(2.0 - alpha);
    const double qc = c * c * reciprocal_gamma(1.0 - alpha);
    if (qa == 0.0) return {};
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return {};
    const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
    std::vector<double> roots;
    roots.push_back(q / qa);
    roots.push_back(q != 0.0 ? qc / q : 0.0);
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace fracopt
