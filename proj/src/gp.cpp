#include "warpbo/gp.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace warpbo {

namespace {

constexpr double kYStdFloor = 1e-12;

// Jitter ladder applied when the bare factorisation fails: 1e-10 up to 1e-6.
constexpr double kJitterStart = 1e-10;
constexpr double kJitterStop = 1e-6;
constexpr int kJitterAttempts = 5;

struct Standardised {
    Eigen::VectorXd y;
    double mean;
    double std;
};

Standardised standardise(const std::vector<double>& values) {
    const auto n = static_cast<Eigen::Index>(values.size());
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(values.data(), n);
    const double mean = y.mean();
    double std = std::sqrt((y.array() - mean).square().mean());
    if (std < kYStdFloor) std = kYStdFloor;
    return {(y.array() - mean) / std, mean, std};
}

Eigen::MatrixXd kernel_inputs(const Dataset& data, const std::optional<WarpMap>& warp) {
    const auto n = static_cast<Eigen::Index>(data.points.size());
    const Eigen::Index d = n > 0 ? data.points.front().size() : 0;
    Eigen::MatrixXd u(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& x = data.points[static_cast<std::size_t>(i)];
        u.row(i) = (warp ? warp_point(*warp, x) : x).transpose();
    }
    return u;
}

Eigen::MatrixXd gram_from_inputs(const Eigen::MatrixXd& u, const KernelParams& params) {
    const Eigen::Index n = u.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = params.amplitude;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = se_kernel(u.row(i), u.row(j), params);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

// Cholesky of K + sigma^2 I, escalating jitter when the bare matrix is not
// numerically positive definite.
std::pair<Eigen::MatrixXd, double> cholesky_with_jitter(const Eigen::MatrixXd& gram,
                                                        double noise_var) {
    Eigen::MatrixXd k = gram;
    k.diagonal().array() += noise_var;
    double jitter = 0.0;
    for (int attempt = 0; attempt <= kJitterAttempts; ++attempt) {
        Eigen::MatrixXd trial = k;
        trial.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(trial);
        if (llt.info() == Eigen::Success) {
            return {llt.matrixL(), jitter};
        }
        jitter = (attempt == 0) ? kJitterStart : jitter * 10.0;
    }
    throw FitError("GP fit: Cholesky failed after exhausting the jitter ladder " +
                   std::to_string(kJitterStart) + " .. " + std::to_string(kJitterStop));
}

} // namespace

void KernelParams::validate() const {
    if (!std::isfinite(amplitude) || !(amplitude > 0.0)) {
        throw std::invalid_argument("KernelParams: amplitude must be finite and > 0");
    }
    if (!std::isfinite(lengthscale) || !(lengthscale > 0.0)) {
        throw std::invalid_argument("KernelParams: lengthscale must be finite and > 0");
    }
    if (!std::isfinite(noise_var) || noise_var < 0.0) {
        throw std::invalid_argument("KernelParams: noise_var must be finite and >= 0");
    }
}

double se_kernel(const Eigen::VectorXd& u, const Eigen::VectorXd& u2, const KernelParams& params) {
    const double sq = (u - u2).squaredNorm();
    return params.amplitude * std::exp(-sq / (2.0 * params.lengthscale * params.lengthscale));
}

double warped_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x2, const WarpMap& warp,
                     const KernelParams& params) {
    return se_kernel(warp_point(warp, x), warp_point(warp, x2), params);
}

Eigen::MatrixXd gram_matrix(const Dataset& data, const WarpMap& warp, const KernelParams& params) {
    return gram_from_inputs(kernel_inputs(data, warp), params);
}

Eigen::MatrixXd gram_matrix(const Dataset& data, const KernelParams& params) {
    return gram_from_inputs(kernel_inputs(data, std::nullopt), params);
}

GpModel GpModel::fit(const Dataset& data, const WarpMap& warp, const KernelParams& params) {
    return fit_impl(data, warp, params);
}

GpModel GpModel::fit(const Dataset& data, const KernelParams& params) {
    return fit_impl(data, std::nullopt, params);
}

GpModel GpModel::fit_impl(const Dataset& data, std::optional<WarpMap> warp,
                          const KernelParams& params) {
    params.validate();
    if (data.size() < 1) {
        throw std::invalid_argument("GP fit: requires at least one observation");
    }
    if (data.points.size() != data.values.size()) {
        throw std::invalid_argument("GP fit: points/values length mismatch");
    }
    GpModel model;
    model.params_ = params;
    model.warp_ = std::move(warp);
    model.inputs_ = kernel_inputs(data, model.warp_);

    const Standardised s = standardise(data.values);
    model.y_mean_ = s.mean;
    model.y_std_ = s.std;

    auto [chol, jitter] = cholesky_with_jitter(gram_from_inputs(model.inputs_, params),
                                               params.noise_var);
    model.chol_ = std::move(chol);
    model.jitter_ = jitter;
    model.weights_ = model.chol_.triangularView<Eigen::Lower>().solve(s.y);
    model.chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(model.weights_);
    return model;
}

std::pair<double, double> GpModel::predict(const Eigen::VectorXd& x) const {
    return predict_kernel_space(warp_ ? warp_point(*warp_, x) : x);
}

std::pair<double, double> GpModel::predict_kernel_space(const Eigen::VectorXd& u) const {
    const Eigen::Index n = inputs_.rows();
    Eigen::VectorXd k_star(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k_star[i] = se_kernel(u, inputs_.row(i), params_);
    }
    const double mean = y_mean_ + y_std_ * k_star.dot(weights_);
    const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k_star);
    double variance = params_.amplitude - v.squaredNorm();
    if (variance < 0.0) variance = 0.0;
    return {mean, variance * y_std_ * y_std_};
}

double log_marginal_likelihood(const Dataset& data, const WarpMap& warp,
                               const KernelParams& params) {
    const GpModel model = GpModel::fit(data, warp, params);
    const Standardised s = standardise(data.values);
    const double quad = s.y.dot(model.weights());
    const double log_det = 2.0 * model.chol().diagonal().array().log().sum();
    return -0.5 * quad - 0.5 * log_det -
           0.5 * data.size() * std::log(2.0 * std::numbers::pi);
}

double log_marginal_likelihood(const Dataset& data, const KernelParams& params) {
    const GpModel model = GpModel::fit(data, params);
    const Standardised s = standardise(data.values);
    const double quad = s.y.dot(model.weights());
    const double log_det = 2.0 * model.chol().diagonal().array().log().sum();
    return -0.5 * quad - 0.5 * log_det -
           0.5 * data.size() * std::log(2.0 * std::numbers::pi);
}

std::vector<double> LengthscaleGrid::values() const {
    if (size < 1 || !(lo > 0.0) || !(lo <= hi)) {
        throw std::invalid_argument("LengthscaleGrid: requires size >= 1 and 0 < lo <= hi");
    }
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(size));
    if (size == 1) {
        v.push_back(lo);
        return v;
    }
    const double log_lo = std::log(lo);
    const double log_hi = std::log(hi);
    for (int i = 0; i < size; ++i) {
        v.push_back(std::exp(log_lo + (log_hi - log_lo) * i / (size - 1)));
    }
    return v;
}

namespace {

template <typename LmlFn>
KernelParams mle_over_grid(const KernelParams& base, const LengthscaleGrid& grid, LmlFn&& lml) {
    KernelParams best = base;
    double best_value = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (double l : grid.values()) {
        KernelParams trial = base;
        trial.lengthscale = l;
        double value;
        try {
            value = lml(trial);
        } catch (const FitError&) {
            continue;
        }
        // >= so that equal likelihoods resolve to the larger lengthscale
        if (!any || value >= best_value) {
            best_value = value;
            best = trial;
            any = true;
        }
    }
    if (!any) {
        throw FitError("fit_lengthscale_mle: every grid lengthscale failed to factorise");
    }
    return best;
}

} // namespace

KernelParams fit_lengthscale_mle(const Dataset& data, const WarpMap& warp,
                                 const KernelParams& base, const LengthscaleGrid& grid) {
    return mle_over_grid(base, grid, [&](const KernelParams& p) {
        return log_marginal_likelihood(data, warp, p);
    });
}

KernelParams fit_lengthscale_mle(const Dataset& data, const KernelParams& base,
                                 const LengthscaleGrid& grid) {
    return mle_over_grid(base, grid, [&](const KernelParams& p) {
        return log_marginal_likelihood(data, p);
    });
}

} // namespace warpbo
