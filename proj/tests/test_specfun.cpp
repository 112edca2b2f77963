#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fracopt/errors.hpp"
#include "fracopt/specfun.hpp"

using namespace fracopt;

namespace {

// exp(x^2) erfc(x), evaluated directly; fine for the moderate x used here.
double erfcx(double x) { return std::exp(x * x) * std::erfc(x); }

}  // namespace

TEST_CASE("gamma at integers and one half") {
    CHECK(fracopt::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fracopt::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-14));
    CHECK(fracopt::gamma(0.5) == doctest::Approx(1.7724538509055160).epsilon(1e-14));
    CHECK(fracopt::gamma(-0.5) == doctest::Approx(-2.0 * std::sqrt(std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("gamma rejects poles") {
    for (double x : {0.0, -1.0, -2.0, -30.0}) CHECK_THROWS_AS(fracopt::gamma(x), DomainError);
    CHECK_THROWS_AS(fracopt::gamma(std::nan("")), DomainError);
}

TEST_CASE("gamma recurrence on 200 random points") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(0.1, 20.0);
    for (int i = 0; i < 200; ++i) {
        const double x = dist(rng);
        const double g1 = fracopt::gamma(x + 1.0);
        CHECK(std::fabs(g1 - x * fracopt::gamma(x)) / g1 <= 1e-12);
    }
}

TEST_CASE("gamma keeps twelve digits across [-170, 170]") {
    for (double x : {-169.5, -10.3, -0.7, 0.001, 3.7, 50.5, 170.0}) {
        const double rel = std::fabs(fracopt::gamma(x) - std::tgamma(x)) / std::fabs(std::tgamma(x));
        CHECK(rel <= 1e-12);
    }
    CHECK(std::fabs(fracopt::gamma(170.5) / std::exp(std::lgamma(170.5)) - 1.0) <= 1e-12);
}

TEST_CASE("reciprocal gamma vanishes at poles") {
    CHECK(reciprocal_gamma(0.0) == 0.0);
    CHECK(reciprocal_gamma(-3.0) == 0.0);
    CHECK(reciprocal_gamma(4.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(reciprocal_gamma(2000.0) == 0.0);
}

TEST_CASE("series config validation") {
    MlSeriesConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.term_tolerance = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.max_terms = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.argument_switch_radius = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("mittag-leffler basic values") {
    CHECK(mittag_leffler(FractionalOrder(1.0), 1.0, 1.0) == doctest::Approx(2.718281828459045).epsilon(1e-15));
    CHECK(mittag_leffler(FractionalOrder(0.9), 1.0, 0.0) == 1.0);
    CHECK(mittag_leffler(FractionalOrder(0.9), 2.5, 0.0) == reciprocal_gamma(2.5));
    CHECK(std::fabs(mittag_leffler(FractionalOrder(2.0), 1.0, -2.4674011002723395)) <= 1e-10);
}

TEST_CASE("mittag-leffler exponential identity") {
    for (int i = 0; i <= 50; ++i) {
        const double t = 0.1 * i;
        CHECK(std::fabs(mittag_leffler(FractionalOrder(1.0), 1.0, -t) - std::exp(-t)) <= 1e-10);
    }
}

TEST_CASE("mittag-leffler cosine identity") {
    for (int i = 0; i <= 20; ++i) {
        const double t = 0.25 * i;
        CHECK(std::fabs(mittag_leffler(FractionalOrder(2.0), 1.0, -t * t) - std::cos(t)) <= 1e-9);
    }
}

TEST_CASE("mittag-leffler half order equals erfcx") {
    for (double x : {0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0}) {
        CHECK(std::fabs(mittag_leffler(FractionalOrder(0.5), 1.0, -x) - erfcx(x)) <= 1e-10);
    }
}

TEST_CASE("mittag-leffler against high-precision reference values") {
    struct Case {
        double alpha, beta, z, value;
    };
    // Computed with 120-digit arithmetic.
    const Case cases[] = {
        {0.5, 1.0, -6.324555320336758664, 0.088130536184438786132},
        {0.9, 1.0, -15.886564694485630854, 0.0074286037652099349253},
        {1.2, 1.0, -31.697863849222266463, -0.0058323682249125295711},
        {1.5, 2.0, -10.0, 0.045888794773684101781},
        {0.3, 1.0, -5.0, 0.13708086902027063889},
        {0.7, 1.0, -3.0, 0.13789710966502708216},
        {0.99, 1.0, -30.0, 0.00035975605168217239754},
        {0.5, 1.0, -0.5, 0.61569034419292587487},
        {0.8, 1.5, 2.5, 16.055204816033073576},
        {0.3, 1.0, -0.001, 0.99888687562755948593},
    };
    for (const Case& c : cases) {
        CAPTURE(c.alpha);
        CAPTURE(c.z);
        CHECK(std::fabs(mittag_leffler(FractionalOrder(c.alpha), c.beta, c.z) - c.value) <= 1e-10);
    }
}

TEST_CASE("mittag-leffler beyond the default radius") {
    MlSeriesConfig wide;
    wide.argument_switch_radius = 128.0;
    CHECK(std::fabs(mittag_leffler(FractionalOrder(1.7), 1.0, -100.23744672545444675, wide) -
                    (-0.0083485694099785438944)) <= 1e-10);
    CHECK_THROWS_AS(mittag_leffler(FractionalOrder(1.7), 1.0, -100.23744672545444675), EvaluationError);
    CHECK(std::fabs(mittag_leffler(FractionalOrder(1.5), 1.0, -63.24555320336758664, wide) -
                    (-0.00426514347056998338)) <= 1e-10);
}

TEST_CASE("mittag-leffler reports the achieved tolerance when refusing") {
    try {
        mittag_leffler(FractionalOrder(1.5), 1.0, -1000.0);
        FAIL("expected an EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(e.achieved_tolerance() > kMittagLefflerAccuracy);
    }
    MlSeriesConfig tight;
    tight.max_terms = 3;
    CHECK_THROWS_AS(mittag_leffler(FractionalOrder(1.5), 2.0, 5.0, tight), EvaluationError);
}

TEST_CASE("mittag-leffler decays monotonically on (0, 1]") {
    for (double a : {0.3, 0.5, 0.7, 0.9, 1.0}) {
        CAPTURE(a);
        double prev = 1.0;
        for (int i = 1; i <= 200; ++i) {
            const double t = 0.1 * i;
            const double v = mittag_leffler(FractionalOrder(a), 1.0, -std::pow(t, a));
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
            CHECK(v < prev);
            prev = v;
        }
    }
}
