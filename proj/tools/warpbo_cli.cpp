#include "warpbo/benchmarks.hpp"
#include "warpbo/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Bayesian optimisation with prior-CDF warped kernels"};
    app.require_subcommand(1);

    std::string config_path;
    int jobs = 1;
    std::string output_dir;
    std::string objective_cmd;
    auto* run = app.add_subcommand("run", "Run the experiment grid described by a JSON config");
    run->add_option("config", config_path, "Path to the experiment config JSON")->required();
    run->add_option("--jobs", jobs, "Parallel (method, seed) cells")->check(CLI::PositiveNumber);
    run->add_option("--output-dir", output_dir, "Override the config's output directory");
    run->add_option("--objective-cmd", objective_cmd,
                    "Replace the config's objective with this external command");

    std::string aggregate_dir;
    auto* agg = app.add_subcommand("aggregate",
                                   "Recompute per-method aggregates from trace files");
    agg->add_option("dir", aggregate_dir, "Directory holding <method>_seed<seed>.csv files")
        ->required();

    auto* list = app.add_subcommand("list-objectives", "List builtin objectives");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            warpbo::ExperimentConfig config = warpbo::ExperimentConfig::from_json_file(config_path);
            if (!output_dir.empty()) config.output_dir = output_dir;
            if (!objective_cmd.empty()) {
                config.objective_name.clear();
                config.external_command = objective_cmd;
            }
            return warpbo::run_experiment(config, jobs);
        }
        if (agg->parsed()) {
            return warpbo::aggregate_directory(aggregate_dir);
        }
        if (list->parsed()) {
            for (const auto& b : warpbo::benchmarks()) {
                std::cout << b.name << " (dim " << b.dim << ", box";
                for (Eigen::Index m = 0; m < b.box.lo.size(); ++m) {
                    std::cout << " [" << b.box.lo[m] << ", " << b.box.hi[m] << "]";
                }
                std::cout << ", min " << b.known_min_value << ")\n";
            }
            return 0;
        }
    } catch (const warpbo::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
