#pragma once

#include "warpbo/box.hpp"

#include <Eigen/Core>

#include <vector>

namespace warpbo {

enum class PriorKind { Uniform, TruncatedNormal, TruncatedGamma };

// One dimension's prior belief about the optimum location, supported on [a, b].
// The density of every kind is strictly positive on (a, b), so no point in the
// box ever loses all likelihood of being the optimum.
struct PriorSpec {
    PriorKind kind = PriorKind::Uniform;
    double a = 0.0; // lower bound, domain units
    double b = 1.0; // upper bound, domain units

    // TruncatedNormal
    double mu = 0.0;
    double sigma = 1.0;

    // TruncatedGamma
    double alpha = 1.0;
    double beta = 1.0;

    static PriorSpec uniform(double a, double b);
    static PriorSpec truncated_normal(double a, double b, double mu, double sigma);
    static PriorSpec truncated_gamma(double a, double b, double alpha, double beta);
};

// Prior CDF Phi on [a, b], strictly increasing with Phi(a) = 0 and Phi(b) = 1
// pinned exactly. Queries drifting outside the support by at most
// 1e-12 * (b - a) are clamped to the boundary; anything further throws
// std::domain_error.
double cdf(const PriorSpec& prior, double x);

// Inverse of cdf by bisection (60 iterations); |cdf(result) - u| <= 1e-10.
// Throws std::domain_error for u outside [0, 1].
double inverse_cdf(const PriorSpec& prior, double u);

// Per-dimension warping maps Phi_m, one prior per search-space dimension.
struct WarpMap {
    std::vector<PriorSpec> dims;

    WarpMap() = default;
    explicit WarpMap(std::vector<PriorSpec> priors) : dims(std::move(priors)) {}

    static WarpMap all_uniform(const Box& box);

    int dim() const { return static_cast<int>(dims.size()); }

    // The box spanned by the priors' supports.
    Box box() const;

    // True when every prior's support equals the corresponding box side.
    bool spans(const Box& space) const;
};

// Component m of the result is cdf(map.dims[m], x[m]). Domain errors are
// rethrown with the offending dimension index in the message.
Eigen::VectorXd warp_point(const WarpMap& map, const Eigen::VectorXd& x);

} // namespace warpbo
