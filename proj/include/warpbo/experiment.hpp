#pragma once

#include "warpbo/acquisition.hpp"
#include "warpbo/box.hpp"
#include "warpbo/driver.hpp"
#include "warpbo/prior.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace warpbo {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Method { WarpedBo, StandardBo, PriorSearch };

std::string method_name(Method method);

// One experiment: an objective, a search box with per-dimension priors, and
// a method x seed grid. Parsed from a JSON document.
struct ExperimentConfig {
    std::string objective_name;   // builtin benchmark; empty when external
    std::string external_command; // set when objective = {"external": ...}
    double external_timeout_seconds = 3600.0;
    Box space;
    WarpMap priors;
    std::vector<Method> methods;
    AcquisitionSpec acquisition;
    int n_init = 4;
    int budget = 0;
    int runs = 10;
    std::uint64_t base_seed = 0;
    Direction direction = Direction::Minimize;
    std::string output_dir = "results";
    MaximizerBudget maximizer_budget;
    double noise_var = 1e-6;
    int refit_every = 1;

    // Both throw ConfigError naming the offending field.
    static ExperimentConfig from_json(const nlohmann::json& doc);
    static ExperimentConfig from_json_file(const std::string& path);

    nlohmann::json to_json() const;
    BoConfig bo_config(std::uint64_t seed) const;
    void validate() const;
};

struct AggregateRow {
    int iteration = 0;
    double mean_best = 0.0;
    double stderr_best = 0.0;
};

// Per-iteration mean and standard error (sample std / sqrt(runs), 0 for a
// single run) of best-so-far across traces. Throws std::invalid_argument
// when traces are empty or lengths differ.
std::vector<AggregateRow> aggregate(const std::vector<std::vector<TraceRecord>>& traces);

// CSV with header iter,x_0,...,x_{d-1},y,best; doubles printed with %.17g so
// re-reading reproduces the trace exactly.
void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> read_trace_csv(const std::string& path);

// CSV with header iter,mean_best,stderr_best.
void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows);

// Runs the method x seed grid, sharing each seed's initial design across
// methods. Writes <method>_seed<seed>.csv per cell, <method>_aggregate.csv
// per fully-completed method, and config_echo.json. Cells run in parallel up
// to `jobs` threads. Returns 0 on full success, 2 when any cell failed
// (diagnostics name the failed method and seed; partial outputs remain).
int run_experiment(const ExperimentConfig& config, int jobs = 1);

// Re-aggregates the <method>_seed<seed>.csv files found in dir. Returns 0 on
// success, 1 when dir holds no traces or their lengths mismatch.
int aggregate_directory(const std::string& dir);

} // namespace warpbo
