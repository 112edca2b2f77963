#include "fracopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "fracopt/csv.hpp"
#include "fracopt/errors.hpp"
#include "fracopt/fracops.hpp"
#include "fracopt/specfun.hpp"

namespace fracopt {

std::string to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::Quadratic: return "quadratic";
        case ProblemKind::Vandermonde: return "vandermonde";
        case ProblemKind::Thomson: return "thomson";
    }
    return "?";
}

std::string to_string(CellStatus status) {
    switch (status) {
        case CellStatus::Completed: return "completed";
        case CellStatus::Diverged: return "diverged";
        case CellStatus::Failed: return "failed";
    }
    return "?";
}

void ExperimentSpec::validate() const {
    if (methods.empty()) throw ConfigError("experiment '" + name + "': at least one [method] is required");
    if (name.empty()) throw ConfigError("experiment name must not be empty");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > 0.0)) throw ConfigError("thresholds must be > 0");
        if (i > 0 && !(thresholds[i] < thresholds[i - 1])) {
            throw ConfigError("thresholds must be strictly decreasing");
        }
    }
    if (restarts < 1) throw ConfigError("restarts must be >= 1");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be > 0");
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    switch (problem) {
        case ProblemKind::Quadratic:
            if (!std::isfinite(center)) throw ConfigError("c must be finite");
            break;
        case ProblemKind::Vandermonde:
            if (degree < 1) throw ConfigError("degree must be >= 1");
            break;
        case ProblemKind::Thomson:
            if (charges < 2) throw ConfigError("charges must be >= 2");
            break;
    }
    std::vector<std::string> labels;
    for (const MethodEntry& m : methods) {
        if (m.label.empty()) throw ConfigError("method label must not be empty");
        if (std::find(labels.begin(), labels.end(), m.label) != labels.end()) {
            throw ConfigError("duplicate method label '" + m.label + "'");
        }
        labels.push_back(m.label);
        OptimizerConfig cfg = m.config;
        cfg.t_end = t_end;
        try {
            cfg.validate();
        } catch (const ConfigError& e) {
            throw ConfigError("method '" + m.label + "': " + e.what());
        }
        if (m.config.method == Method::FGDM && problem != ProblemKind::Quadratic) {
            throw ConfigError("method '" + m.label + "': FGDM needs a scalar problem");
        }
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

class LineError {
public:
    explicit LineError(int line) : line_(line) {}
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("line " + std::to_string(line_) + ": " + what);
    }

private:
    int line_;
};

double parse_real(const std::string& text, const LineError& at) {
    const std::string t = trim(text);
    if (lower(t) == "inf" || lower(t) == "infinity") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
        at.fail("expected a number, got '" + t + "'");
    }
    return v;
}

long long parse_integer(const std::string& text, const LineError& at) {
    const std::string t = trim(text);
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(t, &pos);
    } catch (const std::exception&) {
        at.fail("expected an integer, got '" + t + "'");
    }
    if (pos != t.size()) at.fail("expected an integer, got '" + t + "'");
    return v;
}

std::vector<double> parse_list(const std::string& text, const LineError& at) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(item, at));
    if (out.empty()) at.fail("expected a comma-separated list");
    return out;
}

void apply_method_key(MethodEntry& m, const std::string& key, const std::string& value,
                      const LineError& at) {
    OptimizerConfig& c = m.config;
    try {
        if (key == "label") {
            m.label = value;
        } else if (key == "method") {
            c.method = parse_method(value);
        } else if (key == "alpha") {
            c.alpha = FractionalOrder(parse_real(value, at));
        } else if (key == "omega") {
            c.omega = parse_real(value, at);
        } else if (key == "lambda") {
            c.lambda = parse_real(value, at);
        } else if (key == "operator") {
            c.fgdm_operator = parse_fgdm_operator(value);
        } else if (key == "lower_limit") {
            c.window.lower_limit = parse_real(value, at);
        } else if (key == "memory_length") {
            c.window.memory_length = parse_real(value, at);
        } else if (key == "gl_step") {
            c.window.step = parse_real(value, at);
        } else if (key == "h") {
            c.h = parse_real(value, at);
        } else if (key == "v0") {
            c.v0 = parse_list(value, at);
        } else if (key == "rel_tol") {
            c.rel_tol = parse_real(value, at);
        } else if (key == "abs_tol") {
            c.abs_tol = parse_real(value, at);
        } else if (key == "t_end") {
            at.fail("t_end is shared by all methods; set it before the first [method]");
        } else {
            at.fail("unknown method key '" + key + "'");
        }
    } catch (const DomainError& e) {
        at.fail(e.what());
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        if (what.rfind("line ", 0) == 0) throw;
        at.fail(what);
    }
}

void apply_top_key(ExperimentSpec& s, const std::string& key, const std::string& value,
                   const LineError& at) {
    if (key == "name") {
        s.name = value;
    } else if (key == "problem") {
        const std::string v = lower(value);
        if (v == "quadratic") s.problem = ProblemKind::Quadratic;
        else if (v == "vandermonde") s.problem = ProblemKind::Vandermonde;
        else if (v == "thomson") s.problem = ProblemKind::Thomson;
        else at.fail("unknown problem '" + value + "'");
    } else if (key == "c") {
        s.center = parse_real(value, at);
    } else if (key == "degree") {
        s.degree = static_cast<int>(parse_integer(value, at));
    } else if (key == "nodes") {
        const std::string v = lower(value);
        if (v == "uniform") s.node_rule = NodeRule::InteriorUniform;
        else if (v == "chebyshev") s.node_rule = NodeRule::Chebyshev;
        else at.fail("nodes must be 'uniform' or 'chebyshev'");
    } else if (key == "coefficient_seed") {
        s.coefficient_seed = static_cast<std::uint64_t>(parse_integer(value, at));
    } else if (key == "charges") {
        s.charges = static_cast<int>(parse_integer(value, at));
    } else if (key == "u0") {
        s.u0 = parse_list(value, at);
    } else if (key == "thresholds") {
        s.thresholds = parse_list(value, at);
    } else if (key == "stop_below") {
        s.stop_below = parse_real(value, at);
    } else if (key == "t_end") {
        s.t_end = parse_real(value, at);
    } else if (key == "max_iterations") {
        const long long n = parse_integer(value, at);
        if (n < 1) at.fail("max_iterations must be >= 1");
        s.max_iterations = static_cast<std::size_t>(n);
    } else if (key == "restarts") {
        s.restarts = static_cast<int>(parse_integer(value, at));
    } else if (key == "seed") {
        s.seed = static_cast<std::uint64_t>(parse_integer(value, at));
    } else {
        at.fail("unknown key '" + key + "'");
    }
}

std::string default_label(const OptimizerConfig& c) {
    std::ostringstream os;
    os << lower(to_string(c.method)) << "-a" << c.alpha.value();
    return os.str();
}

}  // namespace

ExperimentSpec parse_experiment(std::istream& in) {
    ExperimentSpec spec;
    spec.methods.clear();
    std::string raw;
    int line_no = 0;
    bool in_method = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const LineError at(line_no);
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (lower(line) != "[method]") at.fail("unknown section " + line);
            spec.methods.emplace_back();
            in_method = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) at.fail("expected key = value");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) at.fail("empty value for '" + key + "'");
        if (in_method) apply_method_key(spec.methods.back(), key, value, at);
        else apply_top_key(spec, key, value, at);
    }
    for (MethodEntry& m : spec.methods) {
        if (m.label.empty()) m.label = default_label(m.config);
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open experiment file " + path.string());
    try {
        return parse_experiment(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::uint64_t derive_seed(std::uint64_t base_seed, int restart) {
    return base_seed + static_cast<std::uint64_t>(restart);
}

bool ExperimentResult::all_completed() const {
    return std::all_of(records.begin(), records.end(),
                       [](const SummaryRecord& r) { return r.status == CellStatus::Completed; });
}

BuiltProblem build_problem(const ExperimentSpec& spec) {
    BuiltProblem out;
    switch (spec.problem) {
        case ProblemKind::Quadratic:
            out.objective = make_quadratic(spec.center);
            out.metric = distance_metric(State{spec.center});
            break;
        case ProblemKind::Vandermonde: {
            VandermondeProblem v =
                spec.coefficient_seed
                    ? make_vandermonde(spec.degree, spec.node_rule, *spec.coefficient_seed)
                    : make_vandermonde(spec.degree, spec.node_rule, alternating_coefficients(spec.degree));
            out.objective = v.objective;
            out.metric = residual_metric(v.spec);
            out.vandermonde = v.spec;
            break;
        }
        case ProblemKind::Thomson: {
            ThomsonProblem t = make_thomson(spec.charges);
            out.objective = t.objective;
            out.metric = objective_metric(t.objective);
            out.thomson = t.spec;
            break;
        }
    }
    return out;
}

namespace {

std::string file_safe(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    }
    return out;
}

std::string threshold_name(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", eps);
    return std::string("t_lt_") + buf;
}

std::string csv_field(const std::string& s) {
    std::string out = s;
    std::replace(out.begin(), out.end(), ',', ';');
    std::replace(out.begin(), out.end(), '\n', ' ');
    return out;
}

State default_start(const ExperimentSpec& spec, int dimension, std::uint64_t seed) {
    if (!spec.u0.empty()) {
        if (static_cast<int>(spec.u0.size()) != dimension) {
            throw ConfigError("u0 has " + std::to_string(spec.u0.size()) + " entries, the problem needs " +
                              std::to_string(dimension));
        }
        return spec.u0;
    }
    switch (spec.problem) {
        case ProblemKind::Quadratic: return State{1.0};
        case ProblemKind::Vandermonde: return State(static_cast<std::size_t>(dimension), 0.0);
        case ProblemKind::Thomson: return random_sphere_configuration(spec.charges, seed);
    }
    return {};
}

SummaryRecord run_cell(const ExperimentSpec& spec, const BuiltProblem& problem, std::size_t entry,
                       int restart, const ExperimentOptions& options) {
    const MethodEntry& m = spec.methods[entry];
    SummaryRecord rec;
    rec.problem = to_string(spec.problem);
    rec.label = m.label;
    rec.method = m.config.method;
    rec.alpha = m.config.alpha.value();
    rec.gain = (rec.method == Method::GDM || rec.method == Method::FGDM) ? m.config.omega : m.config.lambda;
    rec.restart = restart;
    rec.seed = derive_seed(spec.seed, restart);
    rec.first_passage.assign(spec.thresholds.size(), std::nullopt);

    OptimizerConfig cfg = m.config;
    cfg.t_end = spec.t_end;
    StoppingRule stop;
    stop.metric = problem.metric;
    stop.thresholds = spec.thresholds;
    stop.stop_below = spec.stop_below;
    stop.max_iterations = spec.max_iterations;

    try {
        const State u0 = default_start(spec, problem.objective.dimension, rec.seed);
        const RunResult run = run_optimizer(problem.objective, u0, cfg, stop);
        for (std::size_t i = 0; i < spec.thresholds.size(); ++i) {
            rec.first_passage[i] = run.passage(spec.thresholds[i]);
        }
        rec.final_metric = run.final_metric;
        rec.final_objective = run.objective_values.back();
        rec.field_evaluations = run.field_evaluations;
        rec.wall_seconds = run.wall_seconds;
        rec.final_state = run.trace.final_state();
        if (options.write_traces) {
            const std::string stem = file_safe(spec.name + "_" + m.label + "_r" + std::to_string(restart));
            std::ofstream trace(options.out_dir / (stem + ".csv"), std::ios::binary);
            write_run_csv(trace, run);
            if (problem.thomson) {
                std::ofstream charges(options.out_dir / (stem + "_charges.csv"), std::ios::binary);
                write_thomson_csv(charges, *problem.thomson, rec.final_state);
            }
        }
    } catch (const DivergenceError& e) {
        rec.status = CellStatus::Diverged;
        rec.message = e.what();
    } catch (const SingularityError& e) {
        rec.status = CellStatus::Diverged;
        rec.message = e.what();
    } catch (const Error& e) {
        rec.status = CellStatus::Failed;
        rec.message = e.what();
    }
    return rec;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const ExperimentOptions& options) {
    spec.validate();
    if (options.workers < 1) throw ConfigError("workers must be >= 1");
    const BuiltProblem problem = build_problem(spec);
    if (options.write_traces) std::filesystem::create_directories(options.out_dir);

    const std::size_t n_cells = spec.methods.size() * static_cast<std::size_t>(spec.restarts);
    ExperimentResult result;
    result.spec = spec;
    result.records.resize(n_cells);

    // Cell index = entry * restarts + restart, which is also the output order.
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n_cells; i = next++) {
            const std::size_t entry = i / static_cast<std::size_t>(spec.restarts);
            const int restart = static_cast<int>(i % static_cast<std::size_t>(spec.restarts));
            result.records[i] = run_cell(spec, problem, entry, restart, options);
        }
    };
    const int threads = std::min<int>(options.workers, static_cast<int>(n_cells));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (SummaryRecord& rec : result.records) {
        if (rec.status != CellStatus::Completed) continue;
        for (const SummaryRecord& base : result.records) {
            if (base.alpha == 1.0 && base.restart == rec.restart && base.status == CellStatus::Completed) {
                rec.ratio_vs_alpha1 = base.final_metric / rec.final_metric;
                break;
            }
        }
    }
    return result;
}

void write_summary_csv(std::ostream& os, const ExperimentResult& result) {
    os << "problem,label,method,alpha,gain,restart,seed,status";
    for (double eps : result.spec.thresholds) os << ',' << threshold_name(eps);
    os << ",final_metric,final_objective,ratio_vs_alpha1,field_evaluations,message\n";
    for (const SummaryRecord& r : result.records) {
        os << r.problem << ',' << csv_field(r.label) << ',' << to_string(r.method) << ','
           << format_real(r.alpha) << ',' << format_real(r.gain) << ',' << r.restart << ',' << r.seed << ','
           << to_string(r.status);
        for (const auto& fp : r.first_passage) {
            os << ',';
            if (fp) os << format_real(*fp);
        }
        const bool ok = r.status == CellStatus::Completed;
        os << ',' << (ok ? format_real(r.final_metric) : "") << ','
           << (ok ? format_real(r.final_objective) : "") << ','
           << (r.ratio_vs_alpha1 ? format_real(*r.ratio_vs_alpha1) : "") << ',' << r.field_evaluations << ','
           << csv_field(r.message) << '\n';
    }
}

void write_timing_csv(std::ostream& os, const ExperimentResult& result) {
    os << "label,restart,wall_seconds\n";
    for (const SummaryRecord& r : result.records) {
        os << csv_field(r.label) << ',' << r.restart << ',' << format_real(r.wall_seconds) << '\n';
    }
}

const std::vector<std::string>& reproduce_targets() {
    static const std::vector<std::string> targets{"fig1", "fig2", "fig3", "fig4", "table1", "table2"};
    return targets;
}

namespace {

MethodEntry fctm(double alpha, double lambda, double h, std::optional<double> v0 = std::nullopt) {
    MethodEntry m;
    m.config.method = Method::FCTM;
    m.config.alpha = FractionalOrder(alpha);
    m.config.lambda = lambda;
    m.config.h = h;
    if (v0) m.config.v0 = State{*v0};
    std::ostringstream os;
    os << "fctm-a" << alpha;
    if (v0) os << "-v" << *v0;
    m.label = os.str();
    return m;
}

ExperimentSpec quadratic_spec(const std::string& name, double t_end) {
    ExperimentSpec s;
    s.name = name;
    s.problem = ProblemKind::Quadratic;
    s.center = 3.0;
    s.u0 = {1.0};
    s.thresholds = {0.1, 0.01, 0.003, 0.001};
    s.t_end = t_end;
    return s;
}

constexpr double kQuadraticLambda = 1.0;
constexpr double kQuadraticStep = 1e-3;

// Thomson horizon and step: the full-memory solver costs O(steps^2), so the
// pairing is chosen to settle every N within the horizon at desk runtime.
constexpr double kThomsonTEnd = 50.0;
constexpr double kThomsonStep = 0.01;
constexpr int kThomsonRestarts = 10;

}  // namespace

std::vector<ExperimentSpec> reproduce_specs(const std::string& target, std::uint64_t seed) {
    if (target == "fig1") {
        ExperimentSpec s = quadratic_spec("fig1", 20.0);
        s.max_iterations = 400;
        MethodEntry gdm;
        gdm.label = "gdm";
        gdm.config.method = Method::GDM;
        gdm.config.omega = 0.05;
        s.methods.push_back(gdm);
        for (FgdmOperator op : {FgdmOperator::RL, FgdmOperator::Caputo}) {
            MethodEntry m;
            m.config.method = Method::FGDM;
            m.config.alpha = FractionalOrder(0.9);
            m.config.omega = 0.05;
            m.config.fgdm_operator = op;
            m.label = "fgdm-" + lower(to_string(op)) + "-a0.9";
            s.methods.push_back(m);
        }
        s.methods.push_back(fctm(0.9, kQuadraticLambda, kQuadraticStep));
        s.seed = seed;
        return {s};
    }
    if (target == "fig2") {
        ExperimentSpec a = quadratic_spec("fig2a", 40.0);
        for (double alpha : {0.5, 0.7, 0.9, 1.0}) a.methods.push_back(fctm(alpha, kQuadraticLambda, kQuadraticStep));
        ExperimentSpec b = quadratic_spec("fig2b", 40.0);
        for (double alpha : {1.0, 1.2, 1.5, 1.7}) b.methods.push_back(fctm(alpha, kQuadraticLambda, kQuadraticStep));
        a.seed = b.seed = seed;
        return {a, b};
    }
    if (target == "fig3") {
        ExperimentSpec s = quadratic_spec("fig3", 20.0);
        for (double alpha : {1.2, 1.5, 1.7}) {
            for (double v0 : {0.0, 0.5}) s.methods.push_back(fctm(alpha, kQuadraticLambda, kQuadraticStep, v0));
        }
        s.seed = seed;
        return {s};
    }
    if (target == "fig4") {
        ExperimentSpec s = quadratic_spec("fig4", 20.0);
        for (double alpha : {0.5, 0.7, 0.9, 1.2, 1.5, 1.7}) s.methods.push_back(fctm(alpha, kQuadraticLambda, kQuadraticStep));
        s.seed = seed;
        return {s};
    }
    if (target == "table1") {
        ExperimentSpec s;
        s.name = "table1";
        s.problem = ProblemKind::Vandermonde;
        s.degree = 10;
        s.t_end = 50000.0;
        s.thresholds = {0.1, 0.01, 0.001};
        for (double alpha : {0.8, 1.0, 1.2, 1.4, 1.6}) s.methods.push_back(fctm(alpha, 0.001, 5.0));
        s.seed = seed;
        return {s};
    }
    if (target == "table2") {
        std::vector<ExperimentSpec> specs;
        for (int n : {4, 5, 6, 12}) {
            ExperimentSpec s;
            s.name = "table2_n" + std::to_string(n);
            s.problem = ProblemKind::Thomson;
            s.charges = n;
            s.t_end = kThomsonTEnd;
            s.restarts = kThomsonRestarts;
            s.seed = seed;
            s.thresholds = {};
            MethodEntry cgm;
            cgm.label = "cgm-a1";
            cgm.config.method = Method::CGM;
            cgm.config.lambda = 1.0;
            cgm.config.h = kThomsonStep;
            cgm.config.rel_tol = 1e-8;
            cgm.config.abs_tol = 1e-10;
            s.methods.push_back(cgm);
            s.methods.push_back(fctm(0.7, 1.0, kThomsonStep));
            specs.push_back(s);
        }
        return specs;
    }
    throw ConfigError("unknown reproduce target '" + target + "'");
}

namespace {

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path.string());
    body(os);
}

void write_fig4_energy(const ExperimentSpec& spec, const ExperimentOptions& options) {
    const Objective q = make_quadratic(spec.center);
    const State u_star{spec.center};
    constexpr double kEta = 2.0;
    write_file(options.out_dir / "fig4_census.csv", [&](std::ostream& census) {
        census << "alpha,oscillation_minima,monotone_nonincreasing,envelope\n";
        for (const MethodEntry& m : spec.methods) {
            OptimizerConfig cfg = m.config;
            cfg.t_end = spec.t_end;
            const RunResult run = run_fctm(q, spec.u0, cfg, StoppingRule{});
            const EnergyTrace e = energy_trace(run.trace, u_star, kEta);
            const double a = cfg.alpha.value();
            write_file(options.out_dir / file_safe("fig4_energy_a" + format_real(a) + ".csv"),
                       [&](std::ostream& os) { write_energy_csv(os, e); });
            bool monotone = true;
            for (std::size_t i = 1; i < e.V.size(); ++i) monotone = monotone && e.V[i] <= e.V[i - 1];
            std::string envelope = "out_of_scope";
            if (a <= 1.0) {
                envelope = stability_envelope_check(run.trace, u_star, kEta, cfg.alpha).pass ? "pass" : "fail";
            }
            census << format_real(a) << ',' << oscillation_census(e) << ',' << (monotone ? 1 : 0) << ','
                   << envelope << '\n';
        }
    });
}

void write_table2(const std::vector<ExperimentResult>& results, const ExperimentOptions& options) {
    write_file(options.out_dir / "table2.csv", [&](std::ostream& os) {
        os << "charges,label,method,alpha,t_end,h,restarts,best_energy,reference_energy,relative_error,"
              "completed_restarts,field_evaluations_total\n";
        for (const ExperimentResult& r : results) {
            const auto reference = thomson_reference_energy(r.spec.charges);
            for (const MethodEntry& m : r.spec.methods) {
                double best = std::numeric_limits<double>::infinity();
                std::size_t evals = 0;
                int completed = 0;
                for (const SummaryRecord& rec : r.records) {
                    if (rec.label != m.label) continue;
                    evals += rec.field_evaluations;
                    if (rec.status != CellStatus::Completed) continue;
                    ++completed;
                    best = std::min(best, rec.final_objective);
                }
                os << r.spec.charges << ',' << m.label << ',' << to_string(m.config.method) << ','
                   << format_real(m.config.alpha.value()) << ',' << format_real(r.spec.t_end) << ','
                   << format_real(m.config.h) << ',' << r.spec.restarts << ','
                   << (completed ? format_real(best) : "") << ',' << (reference ? format_real(*reference) : "")
                   << ',' << (completed && reference ? format_real((best - *reference) / *reference) : "") << ','
                   << completed << ',' << evals << '\n';
            }
        }
    });
}

}  // namespace

bool reproduce(const std::string& target, const ExperimentOptions& options, std::uint64_t seed,
               std::ostream& log) {
    const std::vector<ExperimentSpec> specs = reproduce_specs(target, seed);
    std::filesystem::create_directories(options.out_dir);
    bool ok = true;
    std::vector<ExperimentResult> results;
    for (const ExperimentSpec& spec : specs) {
        ExperimentResult r = run_experiment(spec, options);
        write_file(options.out_dir / (spec.name + "_summary.csv"),
                   [&](std::ostream& os) { write_summary_csv(os, r); });
        write_file(options.out_dir / (spec.name + "_timing.csv"),
                   [&](std::ostream& os) { write_timing_csv(os, r); });
        log << spec.name << ": " << r.records.size() << " runs, "
            << (r.all_completed() ? "all completed" : "some runs did not complete") << '\n';
        ok = ok && r.all_completed();
        results.push_back(std::move(r));
    }
    if (target == "fig4") write_fig4_energy(specs.front(), options);
    if (target == "table2") write_table2(results, options);
    return ok;
}

namespace {

struct Check {
    std::string name;
    std::function<std::string()> run;  // empty string = pass, otherwise the reason
};

std::string expect_near(double got, double want, double tol) {
    if (std::fabs(got - want) <= tol) return {};
    std::ostringstream os;
    os << "got " << got << ", want " << want << " +- " << tol;
    return os.str();
}

std::string gradient_check(const Objective& obj, std::uint64_t seed, double lo, double hi, int points) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (int p = 0; p < points; ++p) {
        State u(static_cast<std::size_t>(obj.dimension));
        for (double& v : u) v = dist(rng);
        const State g = obj.gradient(u);
        const State fd = central_difference_gradient(obj, u);
        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            diff = std::max(diff, std::fabs(g[i] - fd[i]));
            scale = std::max(scale, std::fabs(g[i]));
        }
        if (diff > 1e-6 * std::max(1.0, scale)) {
            std::ostringstream os;
            os << obj.name << ": analytic and finite-difference gradients differ by " << diff;
            return os.str();
        }
    }
    return {};
}

std::vector<Check> checks() {
    std::vector<Check> out;
    out.push_back({"gradient: quadratic", [] { return gradient_check(make_quadratic(3.0), 1, -5.0, 5.0, 5); }});
    out.push_back({"gradient: vandermonde m=10", [] {
                       return gradient_check(make_vandermonde(10, NodeRule::InteriorUniform,
                                                              alternating_coefficients(10))
                                                 .objective,
                                             2, -2.0, 2.0, 5);
                   }});
    out.push_back({"gradient: thomson N=4", [] {
                       const Objective t = make_thomson(4).objective;
                       for (std::uint64_t s = 0; s < 5; ++s) {
                           State u = random_sphere_configuration(4, 100 + s);
                           for (std::size_t i = 4; i < 8; ++i) u[i] = std::clamp(u[i], 0.1, std::numbers::pi - 0.1);
                           const State g = t.gradient(u);
                           const State fd = central_difference_gradient(t, u);
                           for (std::size_t i = 0; i < u.size(); ++i) {
                               if (std::fabs(g[i] - fd[i]) > 1e-6 * std::max(1.0, std::fabs(g[i]))) {
                                   return std::string("thomson gradient mismatch");
                               }
                           }
                       }
                       return std::string();
                   }});
    out.push_back({"thomson: antipodal pair energy 0.5", [] {
                       return expect_near(make_thomson(2).objective.eval({0.0, 0.0, 0.0, std::numbers::pi}), 0.5, 1e-15);
                   }});
    out.push_back({"fgdm caputo alpha=0.8 settles at c(2-alpha)", [] {
                       OptimizerConfig c;
                       c.method = Method::FGDM;
                       c.alpha = FractionalOrder(0.8);
                       c.omega = 0.05;
                       StoppingRule s;
                       s.step_tolerance = 1e-13;
                       return expect_near(run_fgdm(make_quadratic(3.0), 1.0, c, s).converged_to[0], 3.6, 1e-3);
                   }});
    out.push_back({"fgdm windowed L=h=1e-3 settles at c+h(1-alpha)/(2-alpha)", [] {
                       OptimizerConfig c;
                       c.method = Method::FGDM;
                       c.alpha = FractionalOrder(0.9);
                       c.omega = 0.05;
                       c.window.memory_length = 1e-3;
                       c.window.step = 1e-3;
                       StoppingRule s;
                       s.step_tolerance = 1e-13;
                       return expect_near(run_fgdm(make_quadratic(3.0), 1.0, c, s).converged_to[0],
                                          3.0 + 1e-3 * 0.1 / 1.1, 5e-4);
                   }});
    out.push_back({"pece alpha=0.9 matches the Mittag-Leffler solution", [] {
                       FdeProblem p;
                       p.alpha = FractionalOrder(0.9);
                       p.field = [](const State& u) { return State{-2.0 * (u[0] - 3.0)}; };
                       p.u0 = {1.0};
                       p.t_end = 2.0;
                       p.h = 1e-3;
                       const Trajectory tr = solve_pece(p);
                       double err = 0.0;
                       for (std::size_t n = 0; n < tr.size(); ++n) {
                           const double exact =
                               3.0 - 2.0 * mittag_leffler(p.alpha, 1.0, -2.0 * std::pow(tr.times[n], 0.9));
                           err = std::max(err, std::fabs(tr.states[n][0] - exact));
                       }
                       return expect_near(err, 0.0, 1e-3);
                   }});
    out.push_back({"stability envelope alpha=0.7", [] {
                       OptimizerConfig c;
                       c.method = Method::FCTM;
                       c.alpha = FractionalOrder(0.7);
                       c.h = 1e-2;
                       c.t_end = 5.0;
                       const RunResult r = run_fctm(make_quadratic(3.0), {1.0}, c, StoppingRule{});
                       return stability_envelope_check(r.trace, {3.0}, 2.0, c.alpha).pass
                                  ? std::string()
                                  : std::string("envelope violated");
                   }});
    out.push_back({"oscillations for alpha=1.5", [] {
                       OptimizerConfig c;
                       c.method = Method::FCTM;
                       c.alpha = FractionalOrder(1.5);
                       c.h = 1e-2;
                       c.t_end = 20.0;
                       const RunResult r = run_fctm(make_quadratic(3.0), {1.0}, c, StoppingRule{});
                       return oscillation_census(energy_trace(r.trace, {3.0}, 2.0)) >= 1
                                  ? std::string()
                                  : std::string("no local minimum of V");
                   }});
    out.push_back({"gl vs rl on a cubic", [] {
                       const Polynomial p({1.0, -2.0, 0.5, 3.0});
                       const FractionalOrder a(0.6);
                       MemoryWindow w;
                       w.step = 1e-5;
                       const ScalarFunction f = [&p](double x) { return p(x); };
                       return expect_near(gl_derivative(f, a, 1.5, w), rl_poly_derivative(p, a, 1.5, 0.0), 1e-3);
                   }});
    out.push_back({"caputo taylor series vs closed form", [] {
                       const Polynomial p({1.0, -2.0, 0.5, 3.0});
                       const FractionalOrder a(0.6);
                       return expect_near(caputo_taylor_series(p.derivative_functions(3), a, 1.5, 0.0, 3),
                                          caputo_poly_derivative(p, a, 1.5, 0.0), 1e-10);
                   }});
    out.push_back({"gdm monotone on the quadratic", [] {
                       OptimizerConfig c;
                       c.omega = 0.25;
                       StoppingRule s;
                       s.max_iterations = 200;
                       const RunResult r = run_gdm(make_quadratic(3.0), {1.0}, c, s);
                       for (std::size_t i = 1; i < r.objective_values.size(); ++i) {
                           if (r.objective_values[i] > r.objective_values[i - 1]) return std::string("f increased");
                       }
                       return std::string();
                   }});
    out.push_back({"batch determinism", [] {
                       ExperimentSpec s;
                       s.name = "check";
                       s.problem = ProblemKind::Thomson;
                       s.charges = 4;
                       s.restarts = 3;
                       s.seed = 7;
                       s.t_end = 5.0;
                       s.thresholds = {};
                       MethodEntry m;
                       m.label = "cgm";
                       m.config.method = Method::CGM;
                       m.config.h = 0.01;
                       s.methods.push_back(m);
                       ExperimentOptions o;
                       o.write_traces = false;
                       o.workers = 2;
                       std::ostringstream a, b;
                       write_summary_csv(a, run_experiment(s, o));
                       write_summary_csv(b, run_experiment(s, o));
                       return a.str() == b.str() ? std::string() : std::string("summaries differ");
                   }});
    return out;
}

}  // namespace

bool run_checks(std::ostream& log) {
    bool all = true;
    for (const Check& c : checks()) {
        std::string why;
        try {
            why = c.run();
        } catch (const std::exception& e) {
            why = std::string("threw: ") + e.what();
        }
        if (why.empty()) {
            log << "PASS  " << c.name << '\n';
        } else {
            log << "FAIL  " << c.name << ": " << why << '\n';
            all = false;
        }
    }
    return all;
}

}  // namespace fracopt
