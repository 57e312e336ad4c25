#pragma once

#include "warpbo/box.hpp"
#include "warpbo/gp.hpp"
#include "warpbo/prior.hpp"
#include "warpbo/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

namespace testutil {

// Latin-hypercube dataset: every point sits in its own axis cell per
// dimension, jittered within the middle of the cell, so pairwise distances
// stay bounded below by 0.6 * side / n and dense-inverse oracles remain
// trustworthy. Rejection-free, so any (n, dim) combination terminates.
inline warpbo::Dataset latin_dataset(warpbo::Rng& rng, int n, const warpbo::Box& box) {
    std::vector<std::vector<int>> cells(static_cast<std::size_t>(box.dim()));
    for (auto& perm : cells) {
        perm.resize(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
    }
    warpbo::Dataset data;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd x(box.dim());
        for (int m = 0; m < box.dim(); ++m) {
            const double cell = (box.hi[m] - box.lo[m]) / n;
            const double offset = 0.3 + 0.4 * warpbo::uniform01(rng);
            x[m] = box.lo[m] + (cells[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] + offset) * cell;
        }
        data.add(std::move(x), warpbo::uniform(rng, -2.0, 2.0));
    }
    return data;
}

// Kolmogorov-Smirnov statistic of samples against U(0, 1).
inline double ks_statistic_uniform01(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = samples[i];
        d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - f,
                                 f - static_cast<double>(i) / n));
    }
    return d;
}

// 1% critical value for n = 10 000.
constexpr double kKsCritical1pc = 0.0163;

// Standard normal draw via Box-Muller on the library's uniform stream.
inline double normal01(warpbo::Rng& rng) {
    for (;;) {
        const double u1 = warpbo::uniform01(rng);
        if (u1 <= 0.0) continue;
        const double u2 = warpbo::uniform01(rng);
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }
}

struct GpOracle {
    double mean = 0.0;
    double variance = 0.0;
    double lml = 0.0;
};

// Dense-inverse / eigen-decomposition reference for the Cholesky-based GP.
// Assumes the fit needs no jitter (distinct points, nonzero noise).
inline GpOracle dense_gp_oracle(const warpbo::Dataset& data,
                                const std::optional<warpbo::WarpMap>& warp,
                                const warpbo::KernelParams& params,
                                const Eigen::VectorXd& query) {
    const auto n = static_cast<Eigen::Index>(data.points.size());
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data.values.data(), n);
    const double y_mean = y.mean();
    double y_std = std::sqrt((y.array() - y_mean).square().mean());
    if (y_std < 1e-12) y_std = 1e-12;
    const Eigen::VectorXd ytilde = (y.array() - y_mean) / y_std;

    auto kernel = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return warp ? warpbo::warped_kernel(a, b, *warp, params)
                    : warpbo::se_kernel(a, b, params);
    };
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            k(i, j) = kernel(data.points[static_cast<std::size_t>(i)],
                             data.points[static_cast<std::size_t>(j)]);
        }
    }
    k.diagonal().array() += params.noise_var;

    const Eigen::MatrixXd k_inv = Eigen::FullPivLU<Eigen::MatrixXd>(k).inverse();
    Eigen::VectorXd k_star(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k_star[i] = kernel(query, data.points[static_cast<std::size_t>(i)]);
    }

    GpOracle oracle;
    oracle.mean = y_mean + y_std * k_star.dot(k_inv * ytilde);
    oracle.variance = (params.amplitude - k_star.dot(k_inv * k_star)) * y_std * y_std;

    const Eigen::VectorXd eigenvalues =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues();
    const double log_det = eigenvalues.array().log().sum();
    oracle.lml = -0.5 * ytilde.dot(k_inv * ytilde) - 0.5 * log_det -
                 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    return oracle;
}

} // namespace testutil
