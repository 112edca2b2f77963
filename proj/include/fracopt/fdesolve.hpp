#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fracopt/fractional_order.hpp"

namespace fracopt {

using State = std::vector<double>;
using VectorField = std::function<State(const State&)>;

/// Caputo initial-value problem D^alpha u = F(u), 0 < alpha <= 2, on [0, t_end].
struct FdeProblem {
    FractionalOrder alpha{1.0};
    VectorField field;
    State u0;
    /// u'(0); required exactly when alpha > 1.
    std::optional<State> v0;
    double t_end = 1.0;
    double h = 1e-3;

    std::size_t dimension() const noexcept { return u0.size(); }

    /// Throws ConfigError on any broken invariant.
    void validate() const;
};

struct SolverStats {
    std::size_t steps = 0;
    std::size_t corrector_iterations = 0;
    std::size_t field_evaluations = 0;
    std::size_t rejected_steps = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    SolverStats stats;

    std::size_t size() const noexcept { return times.size(); }
    const State& final_state() const { return states.back(); }
};

/// Called after every accepted grid point; returning false ends the
/// integration early (the point is kept).
using StepObserver = std::function<bool(double t, const State& u)>;

/// Fixed-step fractional Adams–Bashforth–Moulton predictor–corrector
/// (one corrector pass per step) with full memory.
Trajectory solve_pece(const FdeProblem& problem, const StepObserver& observer = {});

/// Number of field evaluations a full-memory PECE run of `steps` steps makes.
constexpr std::size_t pece_field_evaluations(std::size_t steps) noexcept { return 1 + 2 * steps; }

/// Adaptive Dormand–Prince 5(4) integration of the alpha = 1 problem.
/// Records every accepted step; the last point is exactly t_end.
Trajectory solve_reference_ode(const FdeProblem& problem, double rel_tol, double abs_tol,
                               const StepObserver& observer = {});

/// `t,u_0,...,u_{d-1}` followed by one row per grid point.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

}  // namespace fracopt
