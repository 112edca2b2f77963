#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracopt/optimizers.hpp"
#include "fracopt/problems.hpp"

namespace fracopt {

enum class ProblemKind { Quadratic, Vandermonde, Thomson };

std::string to_string(ProblemKind kind);

struct MethodEntry {
    std::string label;
    OptimizerConfig config;
};

struct ExperimentSpec {
    std::string name = "experiment";
    ProblemKind problem = ProblemKind::Quadratic;
    /// Quadratic centre c.
    double center = 3.0;
    /// Vandermonde degree, node rule and generator of u_true.
    int degree = 10;
    NodeRule node_rule = NodeRule::InteriorUniform;
    /// Unset means the alternating +1/-1 coefficients.
    std::optional<std::uint64_t> coefficient_seed;
    /// Thomson charge count.
    int charges = 4;
    /// Starting point; empty means the problem default (quadratic 1,
    /// Vandermonde 0, Thomson a seeded random configuration).
    State u0;
    std::vector<MethodEntry> methods;
    /// Strictly decreasing.
    std::vector<double> thresholds{0.1, 0.01, 0.001};
    std::optional<double> stop_below;
    /// Shared horizon of the continuous methods.
    double t_end = 10.0;
    /// Shared iteration budget of the discrete methods.
    std::size_t max_iterations = 1000;
    int restarts = 1;
    std::uint64_t seed = 0;

    /// Throws ConfigError.
    void validate() const;
};

/// Flat `key = value` text; each `[method]` line opens a method entry whose
/// keys follow it. `#` starts a comment. Throws ConfigError with the line.
ExperimentSpec parse_experiment(std::istream& in);
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// Seed of restart r.
std::uint64_t derive_seed(std::uint64_t base_seed, int restart);

enum class CellStatus { Completed, Diverged, Failed };

std::string to_string(CellStatus status);

struct SummaryRecord {
    std::string problem;
    std::string label;
    Method method = Method::GDM;
    double alpha = 1.0;
    /// omega for discrete methods, lambda for continuous ones.
    double gain = 0.0;
    int restart = 0;
    std::uint64_t seed = 0;
    CellStatus status = CellStatus::Completed;
    std::string message;
    /// Aligned with ExperimentSpec::thresholds.
    std::vector<std::optional<double>> first_passage;
    double final_metric = 0.0;
    double final_objective = 0.0;
    /// Final metric of the alpha = 1 entry (same restart) over this one.
    std::optional<double> ratio_vs_alpha1;
    std::size_t field_evaluations = 0;
    double wall_seconds = 0.0;
    State final_state;
};

struct ExperimentOptions {
    std::filesystem::path out_dir = "out";
    int workers = 1;
    bool write_traces = true;
};

struct ExperimentResult {
    ExperimentSpec spec;
    /// Sorted by (method entry, restart).
    std::vector<SummaryRecord> records;

    bool all_completed() const;
};

struct BuiltProblem {
    Objective objective;
    std::optional<VandermondeSpec> vandermonde;
    std::optional<ThomsonSpec> thomson;
    MetricFunction metric;
};

BuiltProblem build_problem(const ExperimentSpec& spec);

/// Runs every (method, restart) cell. Failing cells are recorded, not thrown.
ExperimentResult run_experiment(const ExperimentSpec& spec, const ExperimentOptions& options);

/// `<name>_summary.csv` (deterministic) and `<name>_timing.csv`.
void write_summary_csv(std::ostream& os, const ExperimentResult& result);
void write_timing_csv(std::ostream& os, const ExperimentResult& result);

/// fig1 .. fig4, table1, table2.
const std::vector<std::string>& reproduce_targets();

/// Canonical experiments behind a target (fig4 adds energy files on top).
std::vector<ExperimentSpec> reproduce_specs(const std::string& target, std::uint64_t seed);

/// Runs a target and writes its CSV files; returns false if any cell failed.
/// Throws ConfigError for an unknown target.
bool reproduce(const std::string& target, const ExperimentOptions& options, std::uint64_t seed,
               std::ostream& log);

/// Quick invariant suite; one PASS/FAIL line per check. True if all pass.
bool run_checks(std::ostream& log);

}  // namespace fracopt
