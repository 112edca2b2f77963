#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fracopt/errors.hpp"
#include "fracopt/fracops.hpp"
#include "fracopt/specfun.hpp"

using namespace fracopt;

namespace {

// Bisection on a sign change of g over [lo, hi].
double bisect(const std::function<double(double)>& g, double lo, double hi) {
    double glo = g(lo);
    REQUIRE(glo * g(hi) < 0.0);
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

MemoryWindow fixed_limit(double a, double h = 1e-5) {
    MemoryWindow w;
    w.lower_limit = a;
    w.step = h;
    return w;
}

}  // namespace

TEST_CASE("polynomial normalization and evaluation") {
    const Polynomial p({0.0, 0.0, 2.0, -1.0});
    CHECK(p.degree() == 1);
    CHECK(p.coefficients() == std::vector<double>{2.0, -1.0});
    CHECK(p(3.0) == 5.0);
    CHECK(Polynomial({}).degree() == 0);
    CHECK(Polynomial({}).coefficients() == std::vector<double>{0.0});

    const Polynomial q = Polynomial::shifted_square(3.0);
    CHECK(q(1.0) == 4.0);
    CHECK(q.derivative()(5.0) == 4.0);
    CHECK(q.derivative().derivative().coefficients() == std::vector<double>{2.0});
    CHECK(Polynomial({7.0}).derivative().coefficients() == std::vector<double>{0.0});
}

TEST_CASE("taylor coefficients re-expand the polynomial") {
    const Polynomial p({1.5, -2.0, 0.25, 3.0, -1.0});
    const double a = 0.7;
    const std::vector<double> t = p.taylor_coefficients(a);
    REQUIRE(t.size() == 5);
    for (double u : {-1.0, 0.0, 0.4, 2.5}) {
        double v = 0.0;
        for (std::size_t k = t.size(); k-- > 0;) v = v * (u - a) + t[k];
        CHECK(v == doctest::Approx(p(u)).epsilon(1e-13));
    }
    CHECK(t[0] == doctest::Approx(p(a)));
    CHECK(t[1] == doctest::Approx(p.derivative()(a)));
}

TEST_CASE("derivative functions past the degree are zero") {
    const auto d = Polynomial::shifted_square(3.0).derivative_functions(4);
    REQUIRE(d.size() == 4);
    CHECK(d[0](5.0) == 4.0);
    CHECK(d[1](5.0) == 2.0);
    CHECK(d[2](5.0) == 0.0);
    CHECK(d[3](5.0) == 0.0);
}

TEST_CASE("memory window validation and effective limit") {
    MemoryWindow w;
    CHECK_NOTHROW(w.validate());
    CHECK(w.effective_lower_limit(4.0) == 0.0);
    w.memory_length = 1.0;
    CHECK(w.effective_lower_limit(4.0) == 3.0);
    CHECK(w.effective_lower_limit(0.5) == 0.0);
    w.step = 2.0;
    CHECK_THROWS_AS(w.validate(), ConfigError);
    w = {};
    w.step = 0.0;
    CHECK_THROWS_AS(w.validate(), ConfigError);
    w = {};
    w.memory_length = -1.0;
    CHECK_THROWS_AS(w.validate(), ConfigError);
}

TEST_CASE("grunwald-letnikov examples") {
    const ScalarFunction id = [](double u) { return u; };
    CHECK(std::fabs(gl_derivative(id, FractionalOrder(1.0), 2.0, fixed_limit(0.0)) - 1.0) <= 1e-4);

    const ScalarFunction sq = [](double u) { return u * u; };
    const double want = fracopt::gamma(3.0) / fracopt::gamma(2.5);
    CHECK(want == doctest::Approx(1.5045055561).epsilon(1e-9));
    CHECK(std::fabs(gl_derivative(sq, FractionalOrder(0.5), 1.0, fixed_limit(0.0)) - want) <= 1e-3);

    const ScalarFunction any = [](double u) { return std::sin(u) + 2.0; };
    CHECK(gl_derivative(any, FractionalOrder(0.0), 3.0, fixed_limit(0.0)) == any(3.0));
}

TEST_CASE("grunwald-letnikov errors") {
    const ScalarFunction id = [](double u) { return u; };
    CHECK_THROWS_AS(gl_derivative(id, FractionalOrder(0.5), 0.0, fixed_limit(0.0)), DomainError);
    CHECK_THROWS_AS(gl_derivative(id, FractionalOrder(0.5), -1.0, fixed_limit(0.0)), DomainError);
    const ScalarFunction hole = [](double u) {
        return u < 0.5 ? std::numeric_limits<double>::quiet_NaN() : u;
    };
    CHECK_THROWS_AS(gl_derivative(hole, FractionalOrder(0.5), 1.0, fixed_limit(0.0, 1e-3)), EvaluationError);
}

TEST_CASE("grunwald-letnikov with a memory window uses only the window") {
    const ScalarFunction sq = [](double u) { return u * u; };
    MemoryWindow w = fixed_limit(0.0, 1e-5);
    w.memory_length = 1.0;
    const Polynomial p({1.0, 0.0, 0.0});
    CHECK(std::fabs(gl_derivative(sq, FractionalOrder(0.5), 3.0, w) -
                    rl_poly_derivative(p, FractionalOrder(0.5), 3.0, 2.0)) <= 1e-3);
}

TEST_CASE("caputo closed form examples") {
    const Polynomial q = Polynomial::shifted_square(3.0);
    CHECK(std::fabs(caputo_poly_derivative(q, FractionalOrder(0.9), 3.3, 0.0)) <= 1e-12);
    CHECK(caputo_poly_derivative(q, FractionalOrder(1.0), 5.0, 0.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(caputo_poly_derivative(Polynomial({7.0}), FractionalOrder(0.5), 2.0, 0.0) == 0.0);
    CHECK(caputo_poly_derivative(q, FractionalOrder(0.0), 5.0, 0.0) == 4.0);
    CHECK_THROWS_AS(caputo_poly_derivative(q, FractionalOrder(0.5), 1.0, 1.0), DomainError);
}

TEST_CASE("caputo of order two on a quadratic is the second derivative") {
    const Polynomial q = Polynomial::shifted_square(3.0);
    CHECK(caputo_poly_derivative(q, FractionalOrder(2.0), 5.0, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("riemann-liouville closed form examples") {
    CHECK(rl_poly_derivative(Polynomial({9.0}), FractionalOrder(0.5), 1.0, 0.0) ==
          doctest::Approx(9.0 / fracopt::gamma(0.5)).epsilon(1e-14));
    CHECK(9.0 / fracopt::gamma(0.5) == doctest::Approx(5.0777062519).epsilon(1e-10));
    const Polynomial q = Polynomial::shifted_square(3.0);
    CHECK(std::fabs(rl_poly_derivative(q, FractionalOrder(1.0 - 1e-8), 5.0, 0.0) - 4.0) <= 1e-5);
    CHECK_THROWS_AS(rl_poly_derivative(q, FractionalOrder(0.5), 0.0, 0.0), DomainError);
}

TEST_CASE("riemann-liouville bracket roots for the quadratic") {
    const FractionalOrder alpha(0.9);
    const double c = 3.0;
    const auto roots = rl_quadratic_bracket_roots(c, alpha);
    REQUIRE(roots.size() == 2);
    // Oracle: the textbook quadratic formula on the bracket coefficients.
    const double A = fracopt::gamma(3.0) / fracopt::gamma(3.0 - 0.9);
    const double B = -2.0 * c * fracopt::gamma(2.0) / fracopt::gamma(2.0 - 0.9);
    const double C = c * c / fracopt::gamma(1.0 - 0.9);
    const double disc = std::sqrt(B * B - 4.0 * A * C);
    CHECK(roots[0] == doctest::Approx((-B - disc) / (2.0 * A)).epsilon(1e-12));
    CHECK(roots[1] == doctest::Approx((-B + disc) / (2.0 * A)).epsilon(1e-12));
    for (double r : roots) {
        CHECK(std::fabs(r - c) > 0.1);
        CHECK(std::fabs(rl_poly_derivative(Polynomial::shifted_square(c), alpha, r, 0.0)) <= 1e-12);
    }
    CHECK(roots[1] == doctest::Approx(3.142).epsilon(1e-3));
}

TEST_CASE("caputo taylor series examples") {
    const Polynomial q = Polynomial::shifted_square(3.0);
    const auto d = q.derivative_functions(4);
    CHECK(std::fabs(caputo_taylor_series(d, FractionalOrder(0.9), 3.3, 0.0, 2)) <= 1e-10);
    const double u = 3.005;
    const double a = u - 0.01;
    CHECK(std::fabs(caputo_taylor_series(d, FractionalOrder(0.5), u, a, 2) -
                    caputo_poly_derivative(q, FractionalOrder(0.5), u, a)) <= 1e-6);
    const double k2 = caputo_taylor_series(d, FractionalOrder(0.7), 2.0, 0.5, 2);
    CHECK(caputo_taylor_series(d, FractionalOrder(0.7), 2.0, 0.5, 4) == k2);
}

TEST_CASE("caputo taylor series errors") {
    const auto d = Polynomial::shifted_square(3.0).derivative_functions(2);
    CHECK_THROWS_AS(caputo_taylor_series(d, FractionalOrder(0.5), 1.0, 1.0, 2), DomainError);
    CHECK_THROWS_AS(caputo_taylor_series(d, FractionalOrder(1.5), 2.0, 1.0, 2), DomainError);
    CHECK_THROWS_AS(caputo_taylor_series(d, FractionalOrder(0.5), 2.0, 1.0, 0), ConfigError);
    CHECK_THROWS_AS(caputo_taylor_series(d, FractionalOrder(0.5), 2.0, 1.0, 3), ConfigError);
}

TEST_CASE("caputo taylor series matches the closed form on polynomials") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(-2.0, 2.0), al(0.05, 0.95), lim(0.0, 2.0), gap(0.1, 3.0);
    for (int i = 0; i < 30; ++i) {
        const Polynomial p({coef(rng), coef(rng), coef(rng), coef(rng), coef(rng)});
        const FractionalOrder alpha(al(rng));
        const double a = lim(rng);
        const double u = a + gap(rng);
        CHECK(std::fabs(caputo_taylor_series(p.derivative_functions(4), alpha, u, a, 4) -
                        caputo_poly_derivative(p, alpha, u, a)) <= 1e-10);
    }
}

TEST_CASE("grunwald-letnikov agrees with the riemann-liouville closed form") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), al(0.05, 0.95), lim(0.0, 4.0), unit(0.0, 1.0);
    std::uniform_int_distribution<int> deg(0, 4);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> c(static_cast<std::size_t>(deg(rng)) + 1);
        for (double& v : c) v = coef(rng);
        const Polynomial p(c);
        const FractionalOrder alpha(al(rng));
        const double a = lim(rng);
        const double u = a + 1.0 + unit(rng) * (4.0 - a);  // u - a >= 1, u <= 5
        const ScalarFunction f = [&p](double x) { return p(x); };
        CAPTURE(i);
        CHECK(std::fabs(gl_derivative(f, alpha, u, fixed_limit(a)) - rl_poly_derivative(p, alpha, u, a)) <= 1e-3);
    }
}

TEST_CASE("caputo and riemann-liouville differ by the image of the constant term") {
    const Polynomial q = Polynomial::shifted_square(3.0);
    const Polynomial constant({9.0});
    for (double alpha : {0.2, 0.5, 0.9}) {
        for (double u : {0.5, 2.0, 4.0}) {
            const FractionalOrder a(alpha);
            const double diff = caputo_poly_derivative(q, a, u, 0.0) - rl_poly_derivative(q, a, u, 0.0) +
                                rl_poly_derivative(constant, a, u, 0.0);
            CHECK(std::fabs(diff) <= 1e-10);
        }
    }
}

TEST_CASE("shifted equilibrium of the caputo derivative") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> lim(0.0, 2.0), off(0.5, 3.0), al(0.1, 0.95);
    for (int i = 0; i < 20; ++i) {
        const double a = lim(rng);
        const double c = a + off(rng);
        const FractionalOrder alpha(al(rng));
        const Polynomial q = Polynomial::shifted_square(c);
        const double root = bisect([&](double u) { return caputo_poly_derivative(q, alpha, u, a); }, a + 1e-9,
                                   a + 2.0 * (c - a) + 1.0);
        CHECK(std::fabs(root - (a + (c - a) * (2.0 - alpha.value()))) <= 1e-8);
    }
    // With a = 0 this is the c(2 - alpha) fixed point.
    const double root = bisect(
        [](double u) { return caputo_poly_derivative(Polynomial::shifted_square(3.0), FractionalOrder(0.9), u, 0.0); },
        1e-9, 7.0);
    CHECK(std::fabs(root - 3.3) <= 1e-8);
}

TEST_CASE("short-memory limit of the windowed caputo zero") {
    const double c = 3.0;
    const Polynomial q = Polynomial::shifted_square(c);
    for (double alpha : {0.5, 0.9}) {
        for (double h : {1e-2, 1e-3, 1e-4}) {
            const FractionalOrder a(alpha);
            const double root =
                bisect([&](double u) { return caputo_poly_derivative(q, a, u, u - h); }, c - 1.0, c + 1.0);
            const double want = c + h * (1.0 - alpha) / (2.0 - alpha);
            CHECK(std::fabs(root - want) <= 1e-3 * h);
        }
    }
}
