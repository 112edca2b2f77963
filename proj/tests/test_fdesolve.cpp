#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracopt/errors.hpp"
#include "fracopt/fdesolve.hpp"
#include "fracopt/problems.hpp"
#include "fracopt/specfun.hpp"

using namespace fracopt;

namespace {

FdeProblem linear_problem(double alpha, double h, double t_end, double lambda = 1.0) {
    FdeProblem p;
    p.alpha = FractionalOrder(alpha);
    p.field = [lambda](const State& u) { return State{-2.0 * lambda * (u[0] - 3.0)}; };
    p.u0 = {1.0};
    if (alpha > 1.0) p.v0 = State{0.0};
    p.t_end = t_end;
    p.h = h;
    return p;
}

// Analytic solution of D^alpha u = -2 (u - 3), u(0) = 1, u'(0) = 0.
double linear_exact(double alpha, double t) {
    MlSeriesConfig wide;
    wide.argument_switch_radius = 128.0;
    return 3.0 - 2.0 * mittag_leffler(FractionalOrder(alpha), 1.0, -2.0 * std::pow(t, alpha), wide);
}

double max_error(const Trajectory& tr, double alpha, double t_from = 0.0) {
    double err = 0.0;
    for (std::size_t n = 0; n < tr.size(); ++n) {
        if (tr.times[n] < t_from) continue;
        err = std::max(err, std::fabs(tr.states[n][0] - linear_exact(alpha, tr.times[n])));
    }
    return err;
}

}  // namespace

TEST_CASE("problem validation") {
    FdeProblem p = linear_problem(0.9, 1e-2, 1.0);
    CHECK_NOTHROW(p.validate());

    FdeProblem q = p;
    q.alpha = FractionalOrder(2.5);
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q.alpha = FractionalOrder(0.0);
    CHECK_THROWS_AS(q.validate(), ConfigError);

    q = p;
    q.alpha = FractionalOrder(1.5);
    CHECK_THROWS_AS(solve_pece(q), ConfigError);  // v0 missing
    q = p;
    q.v0 = State{0.0};
    CHECK_THROWS_AS(q.validate(), ConfigError);  // v0 only for alpha > 1

    q = p;
    q.h = 2.0;
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q = p;
    q.h = 0.0;
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q = p;
    q.field = {};
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q = p;
    q.u0 = {};
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q = p;
    q.field = [](const State&) { return State{std::numeric_limits<double>::infinity()}; };
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q = p;
    q.field = [](const State&) { return State{1.0, 2.0}; };
    CHECK_THROWS_AS(q.validate(), ConfigError);
}

TEST_CASE("pece matches the mittag-leffler solution for alpha = 0.9") {
    const Trajectory tr = solve_pece(linear_problem(0.9, 1e-3, 10.0));
    CHECK(tr.times.back() == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(max_error(tr, 0.9) <= 1e-3);
}

TEST_CASE("pece for alpha = 1 solves the classical linear ode") {
    const Trajectory tr = solve_pece(linear_problem(1.0, 1e-3, 1.0));
    CHECK(std::fabs(tr.final_state()[0] - (3.0 - 2.0 * std::exp(-2.0))) <= 1e-6);
    CHECK(3.0 - 2.0 * std::exp(-2.0) == doctest::Approx(2.7293294).epsilon(1e-7));
}

TEST_CASE("pece matches the two-term solution for alpha = 1.5") {
    const Trajectory tr = solve_pece(linear_problem(1.5, 1e-3, 10.0));
    CHECK(max_error(tr, 1.5) <= 1e-3);
}

TEST_CASE("pece with nonzero initial velocity") {
    FdeProblem p = linear_problem(1.5, 1e-3, 5.0);
    p.v0 = State{0.5};
    const Trajectory tr = solve_pece(p);
    double err = 0.0;
    for (std::size_t n = 0; n < tr.size(); n += 10) {
        const double t = tr.times[n];
        const double z = -2.0 * std::pow(t, 1.5);
        const double exact = 3.0 - 2.0 * mittag_leffler(p.alpha, 1.0, z) + 0.5 * t * mittag_leffler(p.alpha, 2.0, z);
        err = std::max(err, std::fabs(tr.states[n][0] - exact));
    }
    CHECK(err <= 1e-3);
}

TEST_CASE("pece agrees with the reference solver for alpha = 1") {
    const FdeProblem p = linear_problem(1.0, 1e-3, 10.0);
    const Trajectory pece = solve_pece(p);
    const Trajectory ref = solve_reference_ode(p, 1e-10, 1e-12);
    // Compare at the reference solver's accepted times, sampled on the PECE grid.
    double err = 0.0;
    for (std::size_t n = 0; n < ref.size(); ++n) {
        const double t = ref.times[n];
        const auto k = static_cast<std::size_t>(std::llround(t / p.h));
        if (std::fabs(k * p.h - t) > 1e-12) continue;
        err = std::max(err, std::fabs(pece.states[k][0] - ref.states[n][0]));
    }
    CHECK(std::fabs(pece.final_state()[0] - ref.final_state()[0]) <= 1e-4);
    CHECK(err <= 1e-4);
    for (std::size_t n = 0; n < pece.size(); ++n) {
        CHECK(std::fabs(pece.states[n][0] - (3.0 - 2.0 * std::exp(-2.0 * pece.times[n]))) <= 1e-4);
    }
}

TEST_CASE("pece convergence order") {
    for (double alpha : {0.5, 0.9, 1.2, 1.7}) {
        CAPTURE(alpha);
        const double factor = std::pow(2.0, std::min(2.0, 1.0 + alpha)) * 0.7;
        const Trajectory coarse = solve_pece(linear_problem(alpha, 0.02, 4.0));
        const Trajectory fine = solve_pece(linear_problem(alpha, 0.01, 4.0));
        // The t^alpha start-up layer limits the alpha = 0.5 rate near t = 0.
        const double from = alpha < 0.9 ? 1.0 : 0.0;
        CHECK(max_error(coarse, alpha, from) / max_error(fine, alpha, from) >= factor);
    }
}

TEST_CASE("pece preserves equilibria exactly") {
    for (double alpha : {0.4, 1.0, 1.6}) {
        FdeProblem p = linear_problem(alpha, 1e-2, 2.0);
        p.u0 = {3.0};
        const Trajectory tr = solve_pece(p);
        for (const State& s : tr.states) CHECK(s[0] == 3.0);
    }
}

TEST_CASE("pece evaluation count matches full memory") {
    std::size_t calls = 0;
    FdeProblem p = linear_problem(0.7, 1e-2, 3.0);
    p.field = [&calls](const State& u) {
        ++calls;
        return State{-2.0 * (u[0] - 3.0)};
    };
    const std::size_t before = calls;
    const Trajectory tr = solve_pece(p);
    CHECK(tr.stats.steps == 300);
    CHECK(tr.size() == 301);
    CHECK(tr.stats.field_evaluations == pece_field_evaluations(tr.stats.steps));
    CHECK(tr.stats.corrector_iterations == tr.stats.steps);
    // validate() evaluates F(u0) once more.
    CHECK(calls - before == tr.stats.field_evaluations + 1);
}

TEST_CASE("pece grid and initial state") {
    const Trajectory tr = solve_pece(linear_problem(0.8, 0.1, 1.0));
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.states.front() == State{1.0});
    for (std::size_t n = 1; n < tr.size(); ++n) {
        CHECK(tr.times[n] - tr.times[n - 1] == doctest::Approx(0.1).epsilon(1e-12));
    }
}

TEST_CASE("pece is deterministic") {
    const Trajectory a = solve_pece(linear_problem(1.3, 1e-2, 5.0));
    const Trajectory b = solve_pece(linear_problem(1.3, 1e-2, 5.0));
    CHECK(a.times == b.times);
    CHECK(a.states == b.states);
}

TEST_CASE("pece observer can stop early") {
    int seen = 0;
    const Trajectory tr = solve_pece(linear_problem(0.9, 1e-2, 10.0), [&seen](double t, const State&) {
        ++seen;
        return t < 1.0 - 1e-9;
    });
    CHECK(tr.times.back() == doctest::Approx(1.0));
    CHECK(seen == static_cast<int>(tr.size()));
}

TEST_CASE("pece reports divergence with the time") {
    FdeProblem p;
    p.alpha = FractionalOrder(1.0);
    p.field = [](const State& u) { return State{u[0] * u[0]}; };
    p.u0 = {1.0};
    p.t_end = 3.0;
    p.h = 1e-2;
    try {
        solve_pece(p);
        FAIL("expected a DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.where() > 0.9);
        CHECK(e.where() <= 3.0);
    }
}

TEST_CASE("reference solver examples") {
    FdeProblem p = linear_problem(1.0, 1e-2, 1.0);
    const Trajectory tr = solve_reference_ode(p, 1e-8, 1e-8);
    CHECK(tr.times.back() == 1.0);
    CHECK(std::fabs(tr.final_state()[0] - 2.7293294335267746) <= 1e-7);
    CHECK(tr.stats.field_evaluations > 0);

    FdeProblem still;
    still.field = [](const State& u) { return State(u.size(), 0.0); };
    still.u0 = {5.0};
    still.t_end = 7.3;
    still.h = 0.1;
    const Trajectory s = solve_reference_ode(still, 1e-8, 1e-8);
    CHECK(s.final_state()[0] == 5.0);
    CHECK(s.times.back() == 7.3);
}

TEST_CASE("reference solver refuses fractional orders and bad tolerances") {
    CHECK_THROWS_AS(solve_reference_ode(linear_problem(0.9, 1e-2, 1.0), 1e-8, 1e-8), ConfigError);
    CHECK_THROWS_AS(solve_reference_ode(linear_problem(1.0, 1e-2, 1.0), 0.0, 1e-8), ConfigError);
}

TEST_CASE("reference solver on the vandermonde gradient flow") {
    const VandermondeProblem v = make_vandermonde(10, NodeRule::InteriorUniform, alternating_coefficients(10));
    FdeProblem p;
    p.field = [&v](const State& u) {
        State g = v.objective.gradient(u);
        for (double& x : g) x *= -0.001;
        return g;
    };
    p.u0 = State(11, 0.0);
    p.t_end = 2000.0;
    p.h = 1.0;
    const Trajectory tr = solve_reference_ode(p, 1e-10, 1e-12);
    double prev = std::numeric_limits<double>::infinity();
    for (const State& u : tr.states) {
        const State r = v.spec.residual(u);
        double norm = 0.0;
        for (double x : r) norm += x * x;
        norm = std::sqrt(norm);
        CHECK(norm <= prev * (1.0 + 1e-12));
        prev = norm;
    }
}

TEST_CASE("reference solver step collapse is a stiffness error") {
    FdeProblem p;
    p.field = [](const State& u) { return State{u[0] * u[0]}; };
    p.u0 = {1.0};
    p.t_end = 2.0;
    p.h = 1e-2;
    CHECK_THROWS_AS(solve_reference_ode(p, 1e-8, 1e-10), StiffnessError);
}

TEST_CASE("trajectory csv export") {
    FdeProblem p = linear_problem(0.5, 0.5, 1.0);
    const Trajectory tr = solve_pece(p);
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    const std::string csv = os.str();
    CHECK(csv.rfind("t,u_0\n0,1\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header and t = 0, 0.5, 1
}
