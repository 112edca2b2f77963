#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracopt/fdesolve.hpp"
#include "fracopt/fracops.hpp"
#include "fracopt/problems.hpp"

namespace fracopt {

enum class Method { GDM, CGM, FGDM, FCTM };
enum class FgdmOperator { RL, Caputo };

std::string to_string(Method m);
std::string to_string(FgdmOperator op);
/// Case-insensitive; throws ConfigError on unknown names.
Method parse_method(const std::string& name);
FgdmOperator parse_fgdm_operator(const std::string& name);

struct OptimizerConfig {
    Method method = Method::GDM;
    /// Must be 1 for GDM and CGM.
    FractionalOrder alpha{1.0};
    /// Discrete step size (GDM, FGDM).
    double omega = 0.1;
    /// Flow gain (CGM, FCTM).
    double lambda = 1.0;
    FgdmOperator fgdm_operator = FgdmOperator::Caputo;
    MemoryWindow window;
    /// Output grid / first trial step (CGM) and horizon (CGM, FCTM).
    double h = 1e-3;
    double t_end = 10.0;
    /// u'(0) for alpha > 1; zero when unset.
    std::optional<State> v0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;

    /// Throws ConfigError when a field the method uses is out of range.
    void validate() const;
};

using MetricFunction = std::function<double(const State&)>;

/// ||u - u*||_2
MetricFunction distance_metric(State u_star);
/// f(u)
MetricFunction objective_metric(const Objective& objective);
/// ||X u - g||_2
MetricFunction residual_metric(const VandermondeSpec& spec);

struct StoppingRule {
    MetricFunction metric;
    /// Stop as soon as metric <= stop_below.
    std::optional<double> stop_below;
    /// Discrete methods only: stop when ||u_{k+1} - u_k||_inf <= step_tolerance.
    std::optional<double> step_tolerance;
    /// Iteration budget of the discrete methods.
    std::size_t max_iterations = 10000;
    /// Recorded first-passage levels.
    std::vector<double> thresholds;
    /// ||u||_inf above this counts as divergence.
    double divergence_limit = 1e12;
};

enum class StopReason { Threshold, Stationary, Horizon };

struct RunResult {
    Method method = Method::GDM;
    /// Grid times (continuous) or iteration indices (discrete).
    Trajectory trace;
    std::vector<double> objective_values;
    std::vector<double> metric_values;
    /// Threshold -> earliest time or iteration with metric <= threshold.
    std::map<double, double> first_passage;
    double final_metric = 0.0;
    /// Final state for converged or discrete runs, otherwise the best state seen.
    State converged_to;
    bool converged = false;
    StopReason stop_reason = StopReason::Horizon;
    /// Gradient (field) evaluations, or fractional-derivative evaluations for FGDM.
    std::size_t field_evaluations = 0;
    double wall_seconds = 0.0;

    std::optional<double> passage(double threshold) const;
};

/// u_{k+1} = u_k - omega grad f(u_k).
RunResult run_gdm(const Objective& objective, const State& u0, const OptimizerConfig& cfg,
                  const StoppingRule& stop);

/// u_{k+1} = u_k - omega D^alpha f(u_k) on a scalar objective. Polynomial
/// objectives use the closed-form operator; others the Grünwald–Letnikov sum.
RunResult run_fgdm(const Objective& objective, double u0, const OptimizerConfig& cfg,
                   const StoppingRule& stop);

/// D^alpha_t u = -lambda grad f(u). FCTM integrates with solve_pece, CGM with
/// the adaptive reference solver.
RunResult run_fctm(const Objective& objective, const State& u0, const OptimizerConfig& cfg,
                   const StoppingRule& stop);

/// Dispatch on cfg.method. FGDM takes u0[0].
RunResult run_optimizer(const Objective& objective, const State& u0, const OptimizerConfig& cfg,
                        const StoppingRule& stop);

/// Lyapunov energy V(t) = ||u(t) - u*||^2 along a trace.
struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> V;
    double eta = 1.0;
};

EnergyTrace energy_trace(const Trajectory& trace, const State& u_star, double eta);

struct EnvelopeReport {
    EnergyTrace energy;
    bool pass = true;
    /// max over the grid of V(t) - V(0) E_{alpha,1}(-eta t^alpha).
    double worst_excess = 0.0;
    double worst_time = 0.0;
};

/// Checks V(t) <= V(0) E_{alpha,1}(-eta t^alpha) + slack at every grid point.
/// Throws ScopeError for alpha outside (0, 1].
EnvelopeReport stability_envelope_check(const Trajectory& trace, const State& u_star, double eta,
                                        FractionalOrder alpha, double slack = 1e-6);

/// Number of strict interior local minima of V.
int oscillation_census(const EnergyTrace& energy);

/// `t,metric,f,u_0,...` rows.
void write_run_csv(std::ostream& os, const RunResult& result);
/// `t,V` rows.
void write_energy_csv(std::ostream& os, const EnergyTrace& energy);

}  // namespace fracopt
