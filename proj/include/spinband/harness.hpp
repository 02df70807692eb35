#pragma once

#include "spinband/config.hpp"
#include "spinband/fp_solver.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace spinband
{

inline constexpr const char* version_string = "spinband 1.0.0";

struct RunOptions
{
    SolveOptions solve;
    unsigned threads = 1; // parallel drops; never changes results
};

struct DropTrace
{
    std::string spin_bits;
    std::vector<double> f2;
};

struct DropResult
{
    int drop = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    bool has_with = false;
    bool has_without = false;
    double f0_with = 0.0;
    double f0_without = 0.0;
    std::string best_spin;
    std::vector<DropTrace> traces;
};

struct ModeStats
{
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct ExperimentResult
{
    ExperimentConfig config;
    std::vector<DropResult> drops; // ordered by drop index
    std::size_t failures = 0;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Relative gain (with - without) / without per successful drop with both modes.
std::vector<double> spin_gains(const ExperimentResult& result);

// Linear-interpolated quantile of unsorted samples; q in [0, 1].
double quantile(std::vector<double> samples, double q);

ModeStats mode_stats(const ExperimentResult& result, bool with_spin);

// traces.csv, rates.csv, cdf.csv and summary.json.
void export_results(const ExperimentResult& result, const std::filesystem::path& directory);

// Exit codes: 0 success, 2 configuration or usage error, 3 solver failure.
int cli_main(int argc, char** argv);

} // namespace spinband
