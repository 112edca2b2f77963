#include "fracopt/fdesolve.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "fracopt/csv.hpp"
#include "fracopt/errors.hpp"

namespace fracopt {

namespace {

bool all_finite(const State& u) {
    return std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); });
}

[[noreturn]] void diverged(const char* what, double t) {
    std::ostringstream os;
    os << what << ": nonfinite state at t = " << t;
    throw DivergenceError(os.str(), t);
}

std::size_t step_count(const FdeProblem& p) {
    return static_cast<std::size_t>(std::ceil(p.t_end / p.h - 1e-9));
}

// Predictor weights (k+1)^alpha - k^alpha.
std::vector<double> predictor_weights(double alpha, std::size_t n) {
    std::vector<double> b(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0) {
            b[k] = 1.0;
        } else {
            const double kk = static_cast<double>(k);
            b[k] = std::pow(kk, alpha) * std::expm1(alpha * std::log1p(1.0 / kk));
        }
    }
    return b;
}

// Corrector weights (k+2)^p + k^p - 2 (k+1)^p with p = alpha + 1, written as a
// symmetric second difference around k+1 to avoid cancellation at large k.
std::vector<double> corrector_weights(double alpha, std::size_t n) {
    const double p = alpha + 1.0;
    std::vector<double> a(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0) {
            a[k] = std::pow(2.0, p) - 2.0;
        } else {
            const double x = 1.0 / (static_cast<double>(k) + 1.0);
            a[k] = std::pow(static_cast<double>(k) + 1.0, p) *
                   (std::expm1(p * std::log1p(x)) + std::expm1(p * std::log1p(-x)));
        }
    }
    return a;
}

}  // namespace

void FdeProblem::validate() const {
    const double a = alpha.value();
    if (!(a > 0.0 && a <= 2.0)) throw ConfigError("FdeProblem: alpha must lie in (0, 2]");
    if (u0.empty()) throw ConfigError("FdeProblem: dimension must be >= 1");
    if (!field) throw ConfigError("FdeProblem: missing vector field");
    if (!(h > 0.0) || !(t_end > 0.0) || !(h < t_end)) {
        throw ConfigError("FdeProblem: need 0 < h < t_end");
    }
    if (a > 1.0 && !v0) throw ConfigError("FdeProblem: alpha > 1 requires the initial velocity v0");
    if (a <= 1.0 && v0) throw ConfigError("FdeProblem: v0 is only meaningful for alpha > 1");
    if (v0 && v0->size() != u0.size()) throw ConfigError("FdeProblem: v0 dimension mismatch");
    if (!all_finite(u0) || (v0 && !all_finite(*v0))) {
        throw ConfigError("FdeProblem: initial conditions must be finite");
    }
    const State f0 = field(u0);
    if (f0.size() != u0.size() || !all_finite(f0)) {
        throw ConfigError("FdeProblem: F(u0) must be finite and of dimension d");
    }
}

Trajectory solve_pece(const FdeProblem& problem, const StepObserver& observer) {
    problem.validate();
    const double alpha = problem.alpha.value();
    const std::size_t d = problem.dimension();
    const std::size_t n_steps = step_count(problem);
    const double h = problem.h;

    const std::vector<double> b = predictor_weights(alpha, n_steps);
    const std::vector<double> a = corrector_weights(alpha, n_steps);
    const double hp = std::pow(h, alpha);
    const double c_pred = hp / std::tgamma(alpha + 1.0);
    const double c_corr = hp / std::tgamma(alpha + 2.0);

    Trajectory out;
    out.times.reserve(n_steps + 1);
    out.states.reserve(n_steps + 1);

    // Field history, row n holds F(u_n).
    std::vector<double> hist((n_steps + 1) * d);
    const State f0 = problem.field(problem.u0);
    std::copy(f0.begin(), f0.end(), hist.begin());
    out.stats.field_evaluations = 1;
    out.times.push_back(0.0);
    out.states.push_back(problem.u0);
    if (observer && !observer(0.0, problem.u0)) return out;

    State taylor(d), pred(d), corr(d), u(d);
    for (std::size_t n = 0; n < n_steps; ++n) {
        const double t_next = static_cast<double>(n + 1) * h;
        for (std::size_t i = 0; i < d; ++i) {
            taylor[i] = problem.u0[i];
            if (problem.v0) taylor[i] += t_next * (*problem.v0)[i];
        }

        const double nn = static_cast<double>(n);
        const double a0 = std::pow(nn, alpha + 1.0) - (nn - alpha) * std::pow(nn + 1.0, alpha);
        for (std::size_t i = 0; i < d; ++i) {
            pred[i] = b[n] * hist[i];
            corr[i] = a0 * hist[i];
        }
        for (std::size_t j = 1; j <= n; ++j) {
            const double bj = b[n - j];
            const double aj = a[n - j];
            const double* fj = &hist[j * d];
            for (std::size_t i = 0; i < d; ++i) {
                pred[i] += bj * fj[i];
                corr[i] += aj * fj[i];
            }
        }

        for (std::size_t i = 0; i < d; ++i) u[i] = taylor[i] + c_pred * pred[i];
        const State fp = problem.field(u);
        for (std::size_t i = 0; i < d; ++i) u[i] = taylor[i] + c_corr * (fp[i] + corr[i]);
        const State fu = problem.field(u);
        out.stats.field_evaluations += 2;
        ++out.stats.corrector_iterations;
        ++out.stats.steps;

        if (!all_finite(u) || !all_finite(fu)) diverged("solve_pece", t_next);
        std::copy(fu.begin(), fu.end(), hist.begin() + static_cast<std::ptrdiff_t>((n + 1) * d));
        out.times.push_back(t_next);
        out.states.push_back(u);
        if (observer && !observer(t_next, u)) break;
    }
    return out;
}

Trajectory solve_reference_ode(const FdeProblem& problem, double rel_tol, double abs_tol,
                               const StepObserver& observer) {
    problem.validate();
    if (problem.alpha.value() != 1.0) {
        throw ConfigError("solve_reference_ode: only alpha = 1 is supported");
    }
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw ConfigError("solve_reference_ode: tolerances must be positive");
    }
    namespace odeint = boost::numeric::odeint;

    Trajectory out;
    auto system = [&](const State& x, State& dxdt, double /*t*/) {
        dxdt = problem.field(x);
        ++out.stats.field_evaluations;
    };
    auto stepper = odeint::make_controlled(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>());

    State x = problem.u0;
    double t = 0.0;
    double dt = std::min(problem.h, problem.t_end);
    out.times.push_back(t);
    out.states.push_back(x);
    if (observer && !observer(t, x)) return out;

    int consecutive_failures = 0;
    while (t < problem.t_end) {
        const double remaining = problem.t_end - t;
        const bool last = dt >= remaining;
        if (last) dt = remaining;
        const double t_before = t;
        const odeint::controlled_step_result res = stepper.try_step(system, x, t, dt);
        if (res == odeint::fail) {
            ++out.stats.rejected_steps;
            if (++consecutive_failures > 500 || dt < 1e-14 * std::max(1.0, std::fabs(t))) {
                std::ostringstream os;
                os << "solve_reference_ode: step size collapsed to " << dt << " at t = " << t;
                throw StiffnessError(os.str());
            }
            continue;
        }
        consecutive_failures = 0;
        if (last || problem.t_end - t <= 1e-12 * problem.t_end) t = problem.t_end;
        ++out.stats.steps;
        if (!all_finite(x)) diverged("solve_reference_ode", t);
        if (!(t > t_before)) throw StiffnessError("solve_reference_ode: no progress in time");
        out.times.push_back(t);
        out.states.push_back(x);
        if (observer && !observer(t, x)) break;
    }
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
    const std::size_t d = trajectory.states.empty() ? 0 : trajectory.states.front().size();
    os << 't';
    for (std::size_t i = 0; i < d; ++i) os << ",u_" << i;
    os << '\n';
    for (std::size_t n = 0; n < trajectory.size(); ++n) {
        os << format_real(trajectory.times[n]);
        for (double v : trajectory.states[n]) os << ',' << format_real(v);
        os << '\n';
    }
}

}  // namespace fracopt
