#pragma once

#include "warpbo/acquisition.hpp"
#include "warpbo/box.hpp"
#include "warpbo/gp.hpp"
#include "warpbo/prior.hpp"
#include "warpbo/rng.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace warpbo {

enum class Direction { Maximize, Minimize };

// Settings for one optimisation run.
struct BoConfig {
    int n_init = 4;
    int budget = 0;
    AcquisitionSpec acquisition;
    Direction direction = Direction::Minimize;
    std::uint64_t seed = 0;
    MaximizerBudget maximizer_budget;
    double noise_var = 1e-6;
    int refit_every = 1;

    void validate() const;
};

struct TraceRecord {
    int iteration = 0;
    Eigen::VectorXd point;
    double value = 0.0;
    double best = 0.0;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    std::vector<double> iteration_seconds;
    std::uint64_t seed = 0;
    BoConfig config;
    // Set when the run aborted; the trace holds what completed before the error.
    std::optional<std::string> error;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

// n_init i.i.d. uniform points in the box; deterministic given the rng state.
std::vector<Eigen::VectorXd> initial_design(const Box& space, int n_init, Rng& rng);

// Optimisation loop with the warped kernel. When `initial` is non-null it is
// used verbatim as the starting design (shared across compared methods);
// otherwise the design is drawn from the run's own rng.
RunResult run_bo(const Objective& objective, const Box& space, const WarpMap& warp,
                 const BoConfig& config,
                 const std::vector<Eigen::VectorXd>* initial = nullptr);

// Same loop on the plain squared-exponential kernel (no warp); the reference
// standard-BO path.
RunResult run_bo_plain(const Objective& objective, const Box& space, const BoConfig& config,
                       const std::vector<Eigen::VectorXd>* initial = nullptr);

// Baseline: every evaluation point drawn i.i.d. from the prior via its
// inverse CDF. When `initial` is non-null those points are evaluated first
// and prior draws fill the remaining budget.
RunResult run_prior_search(const Objective& objective, const Box& space, const WarpMap& warp,
                           const BoConfig& config,
                           const std::vector<Eigen::VectorXd>* initial = nullptr);

// Truncated-normal prior per dimension, centred offset_fraction of the box
// side away from true_opt (clamped into the box).
WarpMap make_shifted_prior(const Box& space, const Eigen::VectorXd& true_opt,
                           double offset_fraction, double sigma);

} // namespace warpbo
