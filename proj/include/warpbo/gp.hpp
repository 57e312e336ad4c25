#pragma once

#include "warpbo/prior.hpp"

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace warpbo {

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Squared-exponential hyperparameters. The lengthscale is isotropic and lives
// in warped-coordinate units (fractions of [0, 1]) when a warp is in play.
struct KernelParams {
    double amplitude = 1.0;   // sigma_0^2, function variance
    double lengthscale = 0.5; // l
    double noise_var = 1e-6;  // sigma^2, observation-noise variance

    void validate() const;
};

// Observations D_n in original, un-warped coordinates.
struct Dataset {
    std::vector<Eigen::VectorXd> points;
    std::vector<double> values;

    int size() const { return static_cast<int>(points.size()); }

    void add(Eigen::VectorXd x, double y) {
        points.push_back(std::move(x));
        values.push_back(y);
    }
};

// k(u, u') = sigma_0^2 exp(-||u - u'||^2 / (2 l^2))
double se_kernel(const Eigen::VectorXd& u, const Eigen::VectorXd& u2, const KernelParams& params);

// The warped kernel: the squared-exponential evaluated on CDF-transformed
// coordinates, with a single overall amplitude. Equals
// se_kernel(warp_point(warp, x), warp_point(warp, x2), params) exactly.
double warped_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x2, const WarpMap& warp,
                     const KernelParams& params);

// n x n Gram matrix; entry (i, j) = warped_kernel(x_i, x_j).
Eigen::MatrixXd gram_matrix(const Dataset& data, const WarpMap& warp, const KernelParams& params);

// Plain squared-exponential Gram matrix on raw coordinates.
Eigen::MatrixXd gram_matrix(const Dataset& data, const KernelParams& params);

// Fitted posterior state: standardisation constants, the lower Cholesky factor
// of K + sigma^2 I (+ jitter when needed) and the solved weight vector.
// Immutable once built; predict() may be called concurrently.
class GpModel {
public:
    // Warped fit: inputs are passed through the prior CDFs before the kernel.
    static GpModel fit(const Dataset& data, const WarpMap& warp, const KernelParams& params);

    // Plain fit: the squared-exponential kernel on raw coordinates.
    static GpModel fit(const Dataset& data, const KernelParams& params);

    // Predictive mean (original output units) and variance (>= 0, original
    // squared units, i.e. standardised variance scaled by y_std^2).
    std::pair<double, double> predict(const Eigen::VectorXd& x) const;

    // Same moments for a point already expressed in kernel-space coordinates
    // (CDF-warped when the model carries a warp, raw otherwise). predict(x)
    // is exactly predict_kernel_space applied to the warped x.
    std::pair<double, double> predict_kernel_space(const Eigen::VectorXd& u) const;

    const KernelParams& params() const { return params_; }
    const std::optional<WarpMap>& warp() const { return warp_; }
    const Eigen::MatrixXd& chol() const { return chol_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    double y_mean() const { return y_mean_; }
    double y_std() const { return y_std_; }
    double jitter() const { return jitter_; }
    int size() const { return static_cast<int>(inputs_.rows()); }
    int dim() const { return static_cast<int>(inputs_.cols()); }

private:
    GpModel() = default;

    static GpModel fit_impl(const Dataset& data, std::optional<WarpMap> warp,
                            const KernelParams& params);

    KernelParams params_;
    std::optional<WarpMap> warp_;
    Eigen::MatrixXd inputs_; // n x d kernel-space coordinates (warped if warp_ set)
    Eigen::MatrixXd chol_;   // lower-triangular L with L L^T = K + sigma^2 I + jitter I
    Eigen::VectorXd weights_;
    double y_mean_ = 0.0;
    double y_std_ = 1.0;
    double jitter_ = 0.0;
};

// Gaussian log marginal likelihood of the standardised observations,
// -1/2 y^T (K + sigma^2 I)^{-1} y - 1/2 log det(K + sigma^2 I) - n/2 log(2 pi),
// computed from the Cholesky factor.
double log_marginal_likelihood(const Dataset& data, const WarpMap& warp,
                               const KernelParams& params);
double log_marginal_likelihood(const Dataset& data, const KernelParams& params);

// Log-spaced lengthscale grid for maximum-likelihood fitting.
struct LengthscaleGrid {
    double lo = 0.01;
    double hi = 2.0;
    int size = 50;

    std::vector<double> values() const;
};

// Returns base with lengthscale replaced by the grid maximiser of the log
// marginal likelihood; ties break toward the larger lengthscale. Throws
// FitError when every grid point fails to factorise.
KernelParams fit_lengthscale_mle(const Dataset& data, const WarpMap& warp,
                                 const KernelParams& base, const LengthscaleGrid& grid = {});
KernelParams fit_lengthscale_mle(const Dataset& data, const KernelParams& base,
                                 const LengthscaleGrid& grid = {});

} // namespace warpbo
