#include "fracopt/optimizers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "fracopt/csv.hpp"
#include "fracopt/errors.hpp"
#include "fracopt/specfun.hpp"

namespace fracopt {

std::string to_string(Method m) {
    switch (m) {
        case Method::GDM: return "GDM";
        case Method::CGM: return "CGM";
        case Method::FGDM: return "FGDM";
        case Method::FCTM: return "FCTM";
    }
    return "?";
}

std::string to_string(FgdmOperator op) { return op == FgdmOperator::RL ? "RL" : "Caputo"; }

namespace {

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

Method parse_method(const std::string& name) {
    const std::string n = upper(name);
    if (n == "GDM") return Method::GDM;
    if (n == "CGM") return Method::CGM;
    if (n == "FGDM") return Method::FGDM;
    if (n == "FCTM") return Method::FCTM;
    throw ConfigError("unknown method '" + name + "' (expected GDM, CGM, FGDM or FCTM)");
}

FgdmOperator parse_fgdm_operator(const std::string& name) {
    const std::string n = upper(name);
    if (n == "RL") return FgdmOperator::RL;
    if (n == "CAPUTO") return FgdmOperator::Caputo;
    throw ConfigError("unknown FGDM operator '" + name + "' (expected RL or Caputo)");
}

void OptimizerConfig::validate() const {
    const double a = alpha.value();
    switch (method) {
        case Method::GDM:
        case Method::CGM:
            if (a != 1.0) throw ConfigError(to_string(method) + " requires alpha = 1");
            break;
        case Method::FGDM:
            if (!(a > 0.0 && a < 2.0)) throw ConfigError("FGDM requires 0 < alpha < 2");
            window.validate();
            break;
        case Method::FCTM:
            if (!(a > 0.0 && a <= 2.0)) throw ConfigError("FCTM requires 0 < alpha <= 2");
            break;
    }
    if (method == Method::GDM || method == Method::FGDM) {
        if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("omega must be > 0");
    } else {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be > 0");
        if (!(h > 0.0) || !(t_end > h)) throw ConfigError("need 0 < h < t_end");
        if (method == Method::CGM && (!(rel_tol > 0.0) || !(abs_tol > 0.0))) {
            throw ConfigError("CGM tolerances must be > 0");
        }
    }
}

MetricFunction distance_metric(State u_star) {
    return [u_star = std::move(u_star)](const State& u) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - u_star[i]) * (u[i] - u_star[i]);
        return std::sqrt(s);
    };
}

MetricFunction objective_metric(const Objective& objective) {
    return [f = objective.eval](const State& u) { return f(u); };
}

MetricFunction residual_metric(const VandermondeSpec& spec) {
    return [spec](const State& u) {
        const State r = spec.residual(u);
        double s = 0.0;
        for (double v : r) s += v * v;
        return std::sqrt(s);
    };
}

std::optional<double> RunResult::passage(double threshold) const {
    const auto it = first_passage.find(threshold);
    if (it == first_passage.end()) return std::nullopt;
    return it->second;
}

namespace {

using Clock = std::chrono::steady_clock;

// Per-point bookkeeping shared by all methods: objective and metric values,
// first passages, best-so-far and the divergence guard.
class Recorder {
public:
    Recorder(const Objective& objective, const StoppingRule& stop, RunResult& out)
        : objective_(objective), stop_(stop), out_(out) {
        if (stop.metric) {
            metric_ = stop.metric;
        } else if (objective.known_optimum) {
            metric_ = distance_metric(*objective.known_optimum);
        } else {
            metric_ = objective_metric(objective);
        }
        pending_ = stop.thresholds;
    }

    // Returns false once the metric stop fires.
    bool record(double t, const State& u) {
        double norm_inf = 0.0;
        for (double v : u) {
            if (!std::isfinite(v)) diverged(t, "nonfinite iterate");
            norm_inf = std::max(norm_inf, std::fabs(v));
        }
        if (norm_inf > stop_.divergence_limit) diverged(t, "iterate exceeded the divergence limit");

        const double f = objective_.eval(u);
        const double m = metric_(u);
        out_.objective_values.push_back(f);
        out_.metric_values.push_back(m);
        for (auto it = pending_.begin(); it != pending_.end();) {
            if (m <= *it) {
                out_.first_passage.emplace(*it, t);
                it = pending_.erase(it);
            } else {
                ++it;
            }
        }
        if (!(m >= best_metric_)) {
            best_metric_ = m;
            best_state_ = u;
        }
        if (stop_.stop_below && m <= *stop_.stop_below) {
            out_.stop_reason = StopReason::Threshold;
            return false;
        }
        return true;
    }

    void finish(const State& last) {
        out_.final_metric = out_.metric_values.back();
        bool converged = out_.stop_reason != StopReason::Horizon;
        if (!converged && !stop_.stop_below && !stop_.thresholds.empty()) {
            const double tightest = *std::min_element(stop_.thresholds.begin(), stop_.thresholds.end());
            converged = out_.final_metric <= tightest;
        }
        out_.converged = converged;
        // Discrete iterations report where they ended up, so fixed points that
        // miss the extremum stay visible.
        out_.converged_to = converged || is_discrete() ? last : best_state_;
    }

private:
    [[noreturn]] void diverged(double t, const char* why) {
        std::ostringstream os;
        os << to_string(out_.method) << ": " << why << " at " << (is_discrete() ? "iteration " : "t = ")
           << t;
        throw DivergenceError(os.str(), t);
    }

    bool is_discrete() const { return out_.method == Method::GDM || out_.method == Method::FGDM; }

    const Objective& objective_;
    const StoppingRule& stop_;
    RunResult& out_;
    MetricFunction metric_;
    std::vector<double> pending_;
    double best_metric_ = std::numeric_limits<double>::infinity();
    State best_state_;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class Update>
RunResult run_discrete(Method method, const Objective& objective, const State& u0,
                       const StoppingRule& stop, Update&& update) {
    const auto start = Clock::now();
    RunResult out;
    out.method = method;
    Recorder rec(objective, stop, out);

    State u = u0;
    out.trace.times.push_back(0.0);
    out.trace.states.push_back(u);
    bool running = rec.record(0.0, u);
    for (std::size_t k = 0; running && k < stop.max_iterations; ++k) {
        State next = update(u);
        ++out.field_evaluations;
        ++out.trace.stats.steps;
        double change = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) change = std::max(change, std::fabs(next[i] - u[i]));
        u = std::move(next);
        const double t = static_cast<double>(k + 1);
        out.trace.times.push_back(t);
        out.trace.states.push_back(u);
        running = rec.record(t, u);
        if (running && stop.step_tolerance && change <= *stop.step_tolerance) {
            out.stop_reason = StopReason::Stationary;
            running = false;
        }
    }
    out.trace.stats.field_evaluations = out.field_evaluations;
    rec.finish(u);
    out.wall_seconds = seconds_since(start);
    return out;
}

void require_method(const OptimizerConfig& cfg, std::initializer_list<Method> allowed, const char* who) {
    cfg.validate();
    if (std::find(allowed.begin(), allowed.end(), cfg.method) == allowed.end()) {
        throw ConfigError(std::string(who) + ": unsupported method " + to_string(cfg.method));
    }
}

void require_dimension(const Objective& objective, const State& u0, const char* who) {
    if (static_cast<int>(u0.size()) != objective.dimension) {
        throw ConfigError(std::string(who) + ": u0 does not match the objective dimension");
    }
}

double fractional_gradient(const Objective& objective, const OptimizerConfig& cfg, double u) {
    const double a = cfg.window.effective_lower_limit(u);
    if (!(u > a)) {
        std::ostringstream os;
        os << "run_fgdm: iterate u = " << u << " is not above the lower limit " << a;
        throw DomainError(os.str());
    }
    if (objective.polynomial) {
        return cfg.fgdm_operator == FgdmOperator::RL
                   ? rl_poly_derivative(*objective.polynomial, cfg.alpha, u, a)
                   : caputo_poly_derivative(*objective.polynomial, cfg.alpha, u, a);
    }
    const auto f = [&](double x) { return objective.eval(State{x}); };
    if (cfg.fgdm_operator == FgdmOperator::RL) return gl_derivative(f, cfg.alpha, u, cfg.window);

    // Caputo = Riemann–Liouville of f minus its Taylor polynomial at a.
    const double fa = f(a);
    const double da = cfg.alpha.value() > 1.0 ? objective.gradient(State{a})[0] : 0.0;
    const auto g = [&](double x) { return f(x) - fa - da * (x - a); };
    return gl_derivative(g, cfg.alpha, u, cfg.window);
}

}  // namespace

RunResult run_gdm(const Objective& objective, const State& u0, const OptimizerConfig& cfg,
                  const StoppingRule& stop) {
    require_method(cfg, {Method::GDM}, "run_gdm");
    require_dimension(objective, u0, "run_gdm");
    const double omega = cfg.omega;
    return run_discrete(Method::GDM, objective, u0, stop, [&](const State& u) {
        State next = objective.gradient(u);
        for (std::size_t i = 0; i < u.size(); ++i) next[i] = u[i] - omega * next[i];
        return next;
    });
}

RunResult run_fgdm(const Objective& objective, double u0, const OptimizerConfig& cfg,
                   const StoppingRule& stop) {
    require_method(cfg, {Method::FGDM}, "run_fgdm");
    if (objective.dimension != 1) {
        throw ConfigError("run_fgdm: only scalar objectives are supported");
    }
    return run_discrete(Method::FGDM, objective, State{u0}, stop, [&](const State& u) {
        return State{u[0] - cfg.omega * fractional_gradient(objective, cfg, u[0])};
    });
}

RunResult run_fctm(const Objective& objective, const State& u0, const OptimizerConfig& cfg,
                   const StoppingRule& stop) {
    require_method(cfg, {Method::FCTM, Method::CGM}, "run_fctm");
    require_dimension(objective, u0, "run_fctm");
    const auto start = Clock::now();

    RunResult out;
    out.method = cfg.method;
    Recorder rec(objective, stop, out);

    FdeProblem problem;
    problem.alpha = cfg.alpha;
    problem.u0 = u0;
    problem.t_end = cfg.t_end;
    problem.h = cfg.h;
    const double lambda = cfg.lambda;
    problem.field = [&objective, lambda](const State& u) {
        State g = objective.gradient(u);
        for (double& v : g) v *= -lambda;
        return g;
    };
    if (cfg.alpha.value() > 1.0) problem.v0 = cfg.v0.value_or(State(u0.size(), 0.0));

    const StepObserver observer = [&rec](double t, const State& u) { return rec.record(t, u); };
    out.trace = cfg.method == Method::CGM
                    ? solve_reference_ode(problem, cfg.rel_tol, cfg.abs_tol, observer)
                    : solve_pece(problem, observer);
    out.field_evaluations = out.trace.stats.field_evaluations;
    rec.finish(out.trace.final_state());
    out.wall_seconds = seconds_since(start);
    return out;
}

RunResult run_optimizer(const Objective& objective, const State& u0, const OptimizerConfig& cfg,
                        const StoppingRule& stop) {
    switch (cfg.method) {
        case Method::GDM: return run_gdm(objective, u0, cfg, stop);
        case Method::FGDM:
            if (u0.size() != 1) throw ConfigError("run_fgdm: only scalar objectives are supported");
            return run_fgdm(objective, u0[0], cfg, stop);
        case Method::CGM:
        case Method::FCTM: return run_fctm(objective, u0, cfg, stop);
    }
    throw ConfigError("run_optimizer: unknown method");
}

EnergyTrace energy_trace(const Trajectory& trace, const State& u_star, double eta) {
    EnergyTrace e;
    e.eta = eta;
    e.times = trace.times;
    e.V.reserve(trace.size());
    for (const State& u : trace.states) {
        if (u.size() != u_star.size()) throw DomainError("energy_trace: u* dimension mismatch");
        double v = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) v += (u[i] - u_star[i]) * (u[i] - u_star[i]);
        e.V.push_back(v);
    }
    return e;
}

EnvelopeReport stability_envelope_check(const Trajectory& trace, const State& u_star, double eta,
                                        FractionalOrder alpha, double slack) {
    const double a = alpha.value();
    if (!(a > 0.0 && a <= 1.0)) {
        throw ScopeError("stability_envelope_check: the envelope only holds for 0 < alpha <= 1");
    }
    if (!(eta > 0.0)) throw DomainError("stability_envelope_check: eta must be > 0");
    if (trace.size() == 0) throw DomainError("stability_envelope_check: empty trace");

    EnvelopeReport report;
    report.energy = energy_trace(trace, u_star, eta);
    report.worst_excess = -std::numeric_limits<double>::infinity();
    const double v0 = report.energy.V.front();
    for (std::size_t n = 0; n < trace.size(); ++n) {
        const double t = report.energy.times[n];
        const double bound = v0 == 0.0 ? 0.0 : v0 * mittag_leffler(alpha, 1.0, -eta * std::pow(t, a));
        const double excess = report.energy.V[n] - bound;
        if (excess > report.worst_excess) {
            report.worst_excess = excess;
            report.worst_time = t;
        }
    }
    report.pass = report.worst_excess <= slack;
    return report;
}

int oscillation_census(const EnergyTrace& energy) {
    if (energy.V.empty()) throw DomainError("oscillation_census: empty trace");
    int minima = 0;
    for (std::size_t i = 1; i + 1 < energy.V.size(); ++i) {
        if (energy.V[i] < energy.V[i - 1] && energy.V[i] < energy.V[i + 1]) ++minima;
    }
    return minima;
}

void write_run_csv(std::ostream& os, const RunResult& result) {
    const std::size_t d = result.trace.states.empty() ? 0 : result.trace.states.front().size();
    os << "t,metric,f";
    for (std::size_t i = 0; i < d; ++i) os << ",u_" << i;
    os << '\n';
    for (std::size_t n = 0; n < result.trace.size(); ++n) {
        os << format_real(result.trace.times[n]) << ',' << format_real(result.metric_values[n]) << ','
           << format_real(result.objective_values[n]);
        for (double v : result.trace.states[n]) os << ',' << format_real(v);
        os << '\n';
    }
}

void write_energy_csv(std::ostream& os, const EnergyTrace& energy) {
    os << "t,V\n";
    for (std::size_t n = 0; n < energy.times.size(); ++n) {
        os << format_real(energy.times[n]) << ',' << format_real(energy.V[n]) << '\n';
    }
}

}  // namespace fracopt
