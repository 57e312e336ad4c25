#include "warpbo/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace warpbo {

namespace {

// Proposals closer than this to an existing point get jittered before
// evaluation so the Cholesky stays well conditioned.
constexpr double kDuplicateTolerance = 1e-9;
constexpr double kJitterFraction = 1e-6;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Bookkeeping shared by all run modes: raw values in the trace, sign-flipped
// values fed to the model under Minimize.
class RunState {
public:
    RunState(const BoConfig& config, const Box& space)
        : config_(config), space_(space),
          sign_(config.direction == Direction::Minimize ? -1.0 : 1.0) {
        result_.seed = config.seed;
        result_.config = config;
    }

    void record(const Eigen::VectorXd& x, double raw_value, double elapsed) {
        data_.add(x, sign_ * raw_value);
        const bool improved =
            result_.trace.empty() ||
            (config_.direction == Direction::Minimize ? raw_value < result_.trace.back().best
                                                      : raw_value > result_.trace.back().best);
        const double best = improved ? raw_value : result_.trace.back().best;
        result_.trace.push_back(
            {static_cast<int>(result_.trace.size()), x, raw_value, best});
        result_.iteration_seconds.push_back(elapsed);
    }

    // Largest internal (sign-adjusted) observed value; the EI incumbent.
    double incumbent() const {
        double best = -std::numeric_limits<double>::infinity();
        for (double v : data_.values) best = std::max(best, v);
        return best;
    }

    const Dataset& data() const { return data_; }
    const Box& space() const { return space_; }
    double sign() const { return sign_; }
    RunResult take() { return std::move(result_); }
    void fail(const std::string& message) { result_.error = message; }
    int evaluations() const { return static_cast<int>(result_.trace.size()); }

private:
    BoConfig config_;
    Box space_;
    double sign_;
    Dataset data_;
    RunResult result_;
};

Eigen::VectorXd jitter_duplicate(const Eigen::VectorXd& x, const Dataset& data,
                                 const Box& space, Rng& rng) {
    bool duplicate = false;
    for (const auto& p : data.points) {
        if ((x - p).norm() < kDuplicateTolerance) {
            duplicate = true;
            break;
        }
    }
    if (!duplicate) return x;
    Eigen::VectorXd out = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        out[j] += uniform(rng, -1.0, 1.0) * kJitterFraction * space.side(j);
    }
    return space.clamp(out);
}

RunResult run_loop(const Objective& objective, const Box& space,
                   const std::optional<WarpMap>& warp, const BoConfig& config,
                   const std::vector<Eigen::VectorXd>* initial) {
    config.validate();
    if (warp && !warp->spans(space)) {
        throw std::invalid_argument("run_bo: warp does not span the search box");
    }
    Rng rng(config.seed);
    RunState state(config, space);

    std::vector<Eigen::VectorXd> design =
        initial ? *initial : initial_design(space, config.n_init, rng);
    if (design.empty() || static_cast<int>(design.size()) > config.budget) {
        throw std::invalid_argument(
            "run_bo: initial design must hold between 1 and budget points");
    }

    try {
        for (const auto& x : design) {
            const auto start = std::chrono::steady_clock::now();
            const double y = objective(x);
            state.record(x, y, seconds_since(start));
        }

        KernelParams params;
        params.noise_var = config.noise_var;
        int steps = 0;
        while (state.evaluations() < config.budget) {
            const auto start = std::chrono::steady_clock::now();
            if (state.data().size() >= 2 && steps % config.refit_every == 0) {
                params = warp ? fit_lengthscale_mle(state.data(), *warp, params)
                              : fit_lengthscale_mle(state.data(), params);
            }
            const GpModel model = warp ? GpModel::fit(state.data(), *warp, params)
                                       : GpModel::fit(state.data(), params);
            const int n = static_cast<int>(state.data().size());
            Proposal proposal = maximize_acquisition(model, space, config.acquisition,
                                                     state.incumbent(), n,
                                                     config.maximizer_budget, rng);
            const Eigen::VectorXd x =
                jitter_duplicate(proposal.point, state.data(), space, rng);
            const double y = objective(x);
            state.record(x, y, seconds_since(start));
            ++steps;
        }
    } catch (const std::exception& e) {
        state.fail(e.what());
    }
    return state.take();
}

} // namespace

void BoConfig::validate() const {
    if (n_init < 1) {
        throw std::invalid_argument("BoConfig: n_init must be >= 1");
    }
    if (budget < n_init) {
        throw std::invalid_argument("BoConfig: budget must be >= n_init");
    }
    if (!std::isfinite(noise_var) || noise_var < 0.0) {
        throw std::invalid_argument("BoConfig: noise_var must be finite and >= 0");
    }
    if (refit_every < 1) {
        throw std::invalid_argument("BoConfig: refit_every must be >= 1");
    }
    acquisition.validate();
    maximizer_budget.validate();
}

std::vector<Eigen::VectorXd> initial_design(const Box& space, int n_init, Rng& rng) {
    if (n_init < 1) {
        throw std::invalid_argument("initial_design: n_init must be >= 1");
    }
    std::vector<Eigen::VectorXd> points;
    points.reserve(static_cast<std::size_t>(n_init));
    for (int i = 0; i < n_init; ++i) {
        Eigen::VectorXd x(space.dim());
        for (Eigen::Index j = 0; j < space.dim(); ++j) {
            x[j] = uniform(rng, space.lo[j], space.hi[j]);
        }
        points.push_back(std::move(x));
    }
    return points;
}

RunResult run_bo(const Objective& objective, const Box& space, const WarpMap& warp,
                 const BoConfig& config, const std::vector<Eigen::VectorXd>* initial) {
    return run_loop(objective, space, warp, config, initial);
}

RunResult run_bo_plain(const Objective& objective, const Box& space, const BoConfig& config,
                       const std::vector<Eigen::VectorXd>* initial) {
    return run_loop(objective, space, std::nullopt, config, initial);
}

RunResult run_prior_search(const Objective& objective, const Box& space, const WarpMap& warp,
                           const BoConfig& config,
                           const std::vector<Eigen::VectorXd>* initial) {
    config.validate();
    if (!warp.spans(space)) {
        throw std::invalid_argument("run_prior_search: warp does not span the search box");
    }
    Rng rng(config.seed);
    RunState state(config, space);
    try {
        if (initial) {
            if (initial->empty() || static_cast<int>(initial->size()) > config.budget) {
                throw std::invalid_argument(
                    "run_prior_search: initial design must hold between 1 and budget points");
            }
            for (const auto& x : *initial) {
                const auto start = std::chrono::steady_clock::now();
                const double y = objective(x);
                state.record(x, y, seconds_since(start));
            }
        }
        while (state.evaluations() < config.budget) {
            const auto start = std::chrono::steady_clock::now();
            Eigen::VectorXd x(space.dim());
            for (Eigen::Index j = 0; j < space.dim(); ++j) {
                x[j] = inverse_cdf(warp.dims[static_cast<std::size_t>(j)], uniform01(rng));
            }
            const double y = objective(x);
            state.record(x, y, seconds_since(start));
        }
    } catch (const std::exception& e) {
        state.fail(e.what());
    }
    return state.take();
}

WarpMap make_shifted_prior(const Box& space, const Eigen::VectorXd& true_opt,
                           double offset_fraction, double sigma) {
    if (true_opt.size() != space.dim()) {
        throw std::invalid_argument("make_shifted_prior: true_opt dimension mismatch");
    }
    if (!space.contains(true_opt)) {
        throw std::invalid_argument("make_shifted_prior: true_opt must lie in the box");
    }
    if (!(offset_fraction >= 0.0 && offset_fraction < 1.0)) {
        throw std::invalid_argument("make_shifted_prior: offset_fraction must lie in [0, 1)");
    }
    WarpMap warp;
    warp.dims.reserve(static_cast<std::size_t>(space.dim()));
    for (Eigen::Index j = 0; j < space.dim(); ++j) {
        double mu = true_opt[j] + offset_fraction * space.side(j);
        mu = std::min(std::max(mu, space.lo[j]), space.hi[j]);
        warp.dims.push_back(
            PriorSpec::truncated_normal(space.lo[j], space.hi[j], mu, sigma));
    }
    return warp;
}

} // namespace warpbo
