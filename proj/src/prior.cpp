#include "warpbo/prior.hpp"

#include "warpbo/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace warpbo {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void validate_support(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        throw std::invalid_argument("PriorSpec: requires finite bounds with a < b");
    }
}

// Untruncated normal CDF used inside the truncated-normal formula.
double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * (1.0 + erf((x - mu) / (sigma * kSqrt2)));
}

double raw_cdf(const PriorSpec& p, double x) {
    switch (p.kind) {
    case PriorKind::Uniform:
        return (x - p.a) / (p.b - p.a);
    case PriorKind::TruncatedNormal: {
        const double lo = normal_cdf(p.a, p.mu, p.sigma);
        const double hi = normal_cdf(p.b, p.mu, p.sigma);
        return (normal_cdf(x, p.mu, p.sigma) - lo) / (hi - lo);
    }
    case PriorKind::TruncatedGamma: {
        const double lo = reg_lower_incomplete_gamma(p.alpha, p.beta * p.a);
        const double hi = reg_lower_incomplete_gamma(p.alpha, p.beta * p.b);
        return (reg_lower_incomplete_gamma(p.alpha, p.beta * x) - lo) / (hi - lo);
    }
    }
    throw std::logic_error("PriorSpec: unknown kind");
}

} // namespace

PriorSpec PriorSpec::uniform(double a, double b) {
    validate_support(a, b);
    PriorSpec p;
    p.kind = PriorKind::Uniform;
    p.a = a;
    p.b = b;
    return p;
}

PriorSpec PriorSpec::truncated_normal(double a, double b, double mu, double sigma) {
    validate_support(a, b);
    if (!std::isfinite(mu) || !(sigma > 0.0)) {
        throw std::invalid_argument("PriorSpec: truncated normal requires finite mu and sigma > 0");
    }
    PriorSpec p;
    p.kind = PriorKind::TruncatedNormal;
    p.a = a;
    p.b = b;
    p.mu = mu;
    p.sigma = sigma;
    return p;
}

PriorSpec PriorSpec::truncated_gamma(double a, double b, double alpha, double beta) {
    validate_support(a, b);
    if (a < 0.0) {
        throw std::invalid_argument("PriorSpec: truncated gamma requires a >= 0");
    }
    if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw std::invalid_argument("PriorSpec: truncated gamma requires alpha > 0 and beta > 0");
    }
    PriorSpec p;
    p.kind = PriorKind::TruncatedGamma;
    p.a = a;
    p.b = b;
    p.alpha = alpha;
    p.beta = beta;
    return p;
}

double cdf(const PriorSpec& prior, double x) {
    const double width = prior.b - prior.a;
    const double drift = 1e-12 * width;
    // Acquisition iterates graze box faces; absorb sub-drift excursions.
    if (x < prior.a) {
        if (x < prior.a - drift) {
            throw std::domain_error("cdf: x = " + std::to_string(x) + " below support [" +
                                    std::to_string(prior.a) + ", " + std::to_string(prior.b) + "]");
        }
        x = prior.a;
    } else if (x > prior.b) {
        if (x > prior.b + drift) {
            throw std::domain_error("cdf: x = " + std::to_string(x) + " above support [" +
                                    std::to_string(prior.a) + ", " + std::to_string(prior.b) + "]");
        }
        x = prior.b;
    }
    // Boundary values are pinned exactly; interior rounding residue is clamped.
    if (x == prior.a) return 0.0;
    if (x == prior.b) return 1.0;
    const double u = raw_cdf(prior, x);
    if (u < 0.0) return 0.0;
    if (u > 1.0) return 1.0;
    return u;
}

double inverse_cdf(const PriorSpec& prior, double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw std::domain_error("inverse_cdf: u = " + std::to_string(u) + " outside [0, 1]");
    }
    if (u == 0.0) return prior.a;
    if (u == 1.0) return prior.b;
    if (prior.kind == PriorKind::Uniform) {
        // Exact affine inverse. On a unit interval this returns u itself,
        // which keeps uniform-prior warps bit-for-bit transparent to the
        // acquisition search; bisection would quantise at 2^-60 and break
        // that equivalence.
        return std::min(std::max(prior.a + u * (prior.b - prior.a), prior.a), prior.b);
    }
    double lo = prior.a;
    double hi = prior.b;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(prior, mid) < u) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

WarpMap WarpMap::all_uniform(const Box& box) {
    std::vector<PriorSpec> priors;
    priors.reserve(static_cast<std::size_t>(box.dim()));
    for (int m = 0; m < box.dim(); ++m) {
        priors.push_back(PriorSpec::uniform(box.lo[m], box.hi[m]));
    }
    return WarpMap(std::move(priors));
}

Box WarpMap::box() const {
    Eigen::VectorXd lo(dim()), hi(dim());
    for (int m = 0; m < dim(); ++m) {
        lo[m] = dims[static_cast<std::size_t>(m)].a;
        hi[m] = dims[static_cast<std::size_t>(m)].b;
    }
    return Box(std::move(lo), std::move(hi));
}

bool WarpMap::spans(const Box& space) const {
    if (dim() != space.dim()) return false;
    for (int m = 0; m < dim(); ++m) {
        const auto& p = dims[static_cast<std::size_t>(m)];
        if (p.a != space.lo[m] || p.b != space.hi[m]) return false;
    }
    return true;
}

Eigen::VectorXd warp_point(const WarpMap& map, const Eigen::VectorXd& x) {
    if (x.size() != map.dim()) {
        throw std::invalid_argument("warp_point: point dimension " + std::to_string(x.size()) +
                                    " does not match warp dimension " + std::to_string(map.dim()));
    }
    Eigen::VectorXd u(x.size());
    for (Eigen::Index m = 0; m < x.size(); ++m) {
        try {
            u[m] = cdf(map.dims[static_cast<std::size_t>(m)], x[m]);
        } catch (const std::domain_error& e) {
            throw std::domain_error("warp_point: dimension " + std::to_string(m) + ": " + e.what());
        }
    }
    return u;
}

} // namespace warpbo
