// Command-line front end: run experiment files, reproduce the canonical
// tables and figures, or run the quick invariant suite.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fracopt/errors.hpp"
#include "fracopt/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

int run_spec(const std::string& path, const fracopt::ExperimentOptions& options,
             std::optional<std::uint64_t> seed) {
    fracopt::ExperimentSpec spec = fracopt::load_experiment(path);
    std::filesystem::create_directories(options.out_dir);
    if (seed) spec.seed = *seed;
    const fracopt::ExperimentResult result = fracopt::run_experiment(spec, options);
    std::ofstream summary(options.out_dir / (spec.name + "_summary.csv"), std::ios::binary);
    fracopt::write_summary_csv(summary, result);
    std::ofstream timing(options.out_dir / (spec.name + "_timing.csv"), std::ios::binary);
    fracopt::write_timing_csv(timing, result);
    for (const auto& r : result.records) {
        if (r.status != fracopt::CellStatus::Completed) {
            std::cerr << r.label << " restart " << r.restart << ": " << r.message << '\n';
        }
    }
    std::cout << "wrote " << (options.out_dir / (spec.name + "_summary.csv")).string() << '\n';
    return result.all_completed() ? kExitOk : kExitDiverged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional-order optimization laboratory"};
    app.require_subcommand(1);

    std::string out_dir = "out";
    int workers = 1;
    std::optional<std::uint64_t> seed;
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--workers", workers, "Parallel experiment cells")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seed", seed, "Base seed (overrides the experiment file)");

    std::string spec_file;
    CLI::App* run = app.add_subcommand("run", "Run an experiment file");
    run->add_option("spec-file", spec_file, "Experiment file")->required();

    std::string target;
    CLI::App* repro = app.add_subcommand("reproduce", "Reproduce a table or figure as CSV");
    repro->add_option("target", target, "fig1, fig2, fig3, fig4, table1 or table2")->required();

    CLI::App* check = app.add_subcommand("check", "Run the invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    fracopt::ExperimentOptions options;
    options.out_dir = out_dir;
    options.workers = workers;

    try {
        if (*run) return run_spec(spec_file, options, seed);
        if (*repro) {
            const bool ok = fracopt::reproduce(target, options, seed.value_or(7), std::cout);
            return ok ? kExitOk : kExitDiverged;
        }
        if (*check) return fracopt::run_checks(std::cout) ? kExitOk : kExitCheckFailed;
    } catch (const fracopt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDiverged;
    }
    return kExitOk;
}
