#pragma once

#include "warpbo/box.hpp"
#include "warpbo/gp.hpp"
#include "warpbo/rng.hpp"

#include <Eigen/Core>

#include <functional>
#include <utility>

namespace warpbo {

enum class AcquisitionKind { ExpectedImprovement, Ucb };
enum class UcbMode { Simplified, PaperFormula };

// Which acquisition drives the proposal step, plus the UCB confidence
// schedule parameters.
struct AcquisitionSpec {
    AcquisitionKind kind = AcquisitionKind::ExpectedImprovement;
    double delta = 0.1;
    UcbMode ucb_mode = UcbMode::Simplified;
    double ucb_a = 1.0;
    double ucb_b = 1.0;
    double ucb_r = 1.0;

    void validate() const;
};

// Evaluation budget of the inner maximiser: uniform candidate sweep followed
// by Nelder-Mead refinement from the best `restarts` candidates.
struct MaximizerBudget {
    int candidates = 2000;
    int restarts = 10;
    int max_iterations = 200;

    void validate() const;
};

struct Proposal {
    Eigen::VectorXd point;
    double acq_value = 0.0;
    int restarts_used = 0;
};

// (pdf, cdf) of the standard normal at z.
std::pair<double, double> std_normal_pdf_cdf(double z);

// Closed-form expected improvement of N(mean, sd^2) over the incumbent;
// zero when sd == 0, never negative.
double expected_improvement(double mean, double sd, double incumbent);

// mean + sqrt(gamma) * sd.
double ucb_value(double mean, double sd, double gamma);

// Confidence weight gamma_n for iteration n in dimension d.
double ucb_gamma(int n, int d, const AcquisitionSpec& spec);

double acquisition_value(const GpModel& model, const Eigen::VectorXd& x,
                         const AcquisitionSpec& spec, double incumbent, int n);

// Maximise an arbitrary function over the box: `candidates` uniform draws,
// then Nelder-Mead from the top `restarts` of them, iterates clamped to the
// box. Deterministic given the rng state.
Proposal maximize_function(const std::function<double(const Eigen::VectorXd&)>& fn,
                           const Box& space, const MaximizerBudget& budget, Rng& rng);

Proposal maximize_acquisition(const GpModel& model, const Box& space,
                              const AcquisitionSpec& spec, double incumbent, int n,
                              const MaximizerBudget& budget, Rng& rng);

} // namespace warpbo
