#include "warpbo/acquisition.hpp"

#include "warpbo/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace warpbo {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kInvSqrt2 = 0.70710678118654752440;

// Fraction of each box side used for the initial Nelder-Mead simplex.
constexpr double kSimplexSideFraction = 0.02;

} // namespace

void AcquisitionSpec::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("AcquisitionSpec: delta must lie in (0, 1)");
    }
    if (!(ucb_a > 0.0) || !(ucb_b > 0.0) || !(ucb_r > 0.0)) {
        throw std::invalid_argument("AcquisitionSpec: UCB constants a, b, r must be > 0");
    }
}

void MaximizerBudget::validate() const {
    if (candidates < 1 || restarts < 1 || max_iterations < 0) {
        throw std::invalid_argument(
            "MaximizerBudget: requires candidates >= 1, restarts >= 1, max_iterations >= 0");
    }
    if (restarts > candidates) {
        throw std::invalid_argument("MaximizerBudget: restarts must not exceed candidates");
    }
}

std::pair<double, double> std_normal_pdf_cdf(double z) {
    const double pdf = kInvSqrt2Pi * std::exp(-0.5 * z * z);
    const double cdf = 0.5 * (1.0 + warpbo::erf(z * kInvSqrt2));
    return {pdf, cdf};
}

double expected_improvement(double mean, double sd, double incumbent) {
    if (!(sd > 0.0)) return 0.0;
    const double z = (mean - incumbent) / sd;
    const auto [pdf, cdf] = std_normal_pdf_cdf(z);
    const double ei = (mean - incumbent) * cdf + sd * pdf;
    return ei > 0.0 ? ei : 0.0;
}

double ucb_value(double mean, double sd, double gamma) {
    return mean + std::sqrt(gamma) * sd;
}

double ucb_gamma(int n, int d, const AcquisitionSpec& spec) {
    if (n < 1 || d < 1) {
        throw std::invalid_argument("ucb_gamma: requires n >= 1 and d >= 1");
    }
    spec.validate();
    const double pi2 = std::numbers::pi * std::numbers::pi;
    if (spec.ucb_mode == UcbMode::Simplified) {
        return 2.0 * std::log(d * static_cast<double>(n) * n * pi2 / (6.0 * spec.delta));
    }
    const double pi_n = pi2 * static_cast<double>(n) * n / 6.0;
    const double inner = d * static_cast<double>(n) * spec.ucb_b * spec.ucb_r *
                         std::sqrt(std::log(2.0 * d * spec.ucb_a / spec.delta));
    return 2.0 * std::log(2.0 * pi_n / spec.delta) + 4.0 * d * std::log(inner);
}

double acquisition_value(const GpModel& model, const Eigen::VectorXd& x,
                         const AcquisitionSpec& spec, double incumbent, int n) {
    const auto [mean, variance] = model.predict(x);
    const double sd = std::sqrt(variance);
    if (spec.kind == AcquisitionKind::ExpectedImprovement) {
        return expected_improvement(mean, sd, incumbent);
    }
    return ucb_value(mean, sd, ucb_gamma(n, static_cast<int>(model.dim()), spec));
}

namespace {

struct Vertex {
    Eigen::VectorXd x;
    double value;
};

// Nelder-Mead ascent with iterates clamped to the box. Starts from a simplex
// whose sides are a fixed fraction of each box side.
Vertex nelder_mead(const std::function<double(const Eigen::VectorXd&)>& fn, const Box& space,
                   const Eigen::VectorXd& start, double start_value, int max_iterations) {
    constexpr double kReflection = 1.0;
    constexpr double kExpansion = 2.0;
    constexpr double kContraction = 0.5;
    constexpr double kShrink = 0.5;

    const auto d = start.size();
    std::vector<Vertex> simplex;
    simplex.reserve(static_cast<std::size_t>(d) + 1);
    simplex.push_back({start, start_value});
    for (Eigen::Index j = 0; j < d; ++j) {
        Eigen::VectorXd v = start;
        const double step = kSimplexSideFraction * space.side(j);
        v[j] = (v[j] + step <= space.hi[j]) ? v[j] + step : v[j] - step;
        simplex.push_back({space.clamp(v), fn(space.clamp(v))});
    }

    auto by_value_desc = [](const Vertex& a, const Vertex& b) { return a.value > b.value; };
    for (int it = 0; it < max_iterations; ++it) {
        std::sort(simplex.begin(), simplex.end(), by_value_desc);
        Vertex& worst = simplex.back();

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i].x;
        centroid /= static_cast<double>(simplex.size() - 1);

        const Eigen::VectorXd reflected =
            space.clamp(centroid + kReflection * (centroid - worst.x));
        const double f_reflected = fn(reflected);

        if (f_reflected > simplex.front().value) {
            const Eigen::VectorXd expanded =
                space.clamp(centroid + kExpansion * (reflected - centroid));
            const double f_expanded = fn(expanded);
            worst = (f_expanded > f_reflected) ? Vertex{expanded, f_expanded}
                                               : Vertex{reflected, f_reflected};
            continue;
        }
        if (f_reflected > simplex[simplex.size() - 2].value) {
            worst = {reflected, f_reflected};
            continue;
        }
        const Eigen::VectorXd contracted =
            space.clamp(centroid + kContraction * (worst.x - centroid));
        const double f_contracted = fn(contracted);
        if (f_contracted > worst.value) {
            worst = {contracted, f_contracted};
            continue;
        }
        for (std::size_t i = 1; i < simplex.size(); ++i) {
            simplex[i].x = space.clamp(simplex.front().x +
                                       kShrink * (simplex[i].x - simplex.front().x));
            simplex[i].value = fn(simplex[i].x);
        }
    }
    std::sort(simplex.begin(), simplex.end(), by_value_desc);
    return simplex.front();
}

} // namespace

Proposal maximize_function(const std::function<double(const Eigen::VectorXd&)>& fn,
                           const Box& space, const MaximizerBudget& budget, Rng& rng) {
    budget.validate();
    const auto d = space.dim();

    std::vector<Vertex> candidates;
    candidates.reserve(static_cast<std::size_t>(budget.candidates));
    for (int i = 0; i < budget.candidates; ++i) {
        Eigen::VectorXd x(d);
        for (Eigen::Index j = 0; j < d; ++j) x[j] = uniform(rng, space.lo[j], space.hi[j]);
        candidates.push_back({std::move(x), 0.0});
        candidates.back().value = fn(candidates.back().x);
    }

    const int restarts = std::min<int>(budget.restarts, budget.candidates);
    std::partial_sort(candidates.begin(), candidates.begin() + restarts, candidates.end(),
                      [](const Vertex& a, const Vertex& b) { return a.value > b.value; });

    // Refinement never loses ground: the best raw candidate stays in play.
    Vertex best = candidates.front();
    for (int i = 0; i < restarts; ++i) {
        const Vertex refined = nelder_mead(fn, space, candidates[i].x, candidates[i].value,
                                           budget.max_iterations);
        if (refined.value > best.value) best = refined;
    }
    return {std::move(best.x), best.value, restarts};
}

Proposal maximize_acquisition(const GpModel& model, const Box& space,
                              const AcquisitionSpec& spec, double incumbent, int n,
                              const MaximizerBudget& budget, Rng& rng) {
    spec.validate();
    if (!model.warp()) {
        return maximize_function(
            [&](const Eigen::VectorXd& x) {
                return acquisition_value(model, x, spec, incumbent, n);
            },
            space, budget, rng);
    }
    // The posterior of a warped model is stationary in warp coordinates, so
    // the candidate sweep and the simplex refinement run there. Searching raw
    // coordinates instead fails once the prior sharpens: the warp compresses
    // the acquisition mass near the prior mode into a sliver that uniform raw
    // candidates straddle, and flattens the tails into plateaus that stall
    // the simplex. The winner maps back through the inverse CDFs so callers
    // still receive, and evaluate the objective at, a raw point in `space`.
    const WarpMap& warp = *model.warp();
    Proposal best = maximize_function(
        [&](const Eigen::VectorXd& u) {
            const auto [mean, variance] = model.predict_kernel_space(u);
            const double sd = std::sqrt(variance);
            if (spec.kind == AcquisitionKind::ExpectedImprovement) {
                return expected_improvement(mean, sd, incumbent);
            }
            return ucb_value(mean, sd, ucb_gamma(n, static_cast<int>(model.dim()), spec));
        },
        Box::unit(space.dim()), budget, rng);
    for (int m = 0; m < space.dim(); ++m) {
        best.point[m] = inverse_cdf(warp.dims[static_cast<std::size_t>(m)], best.point[m]);
    }
    return best;
}

} // namespace warpbo
