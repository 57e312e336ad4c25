#pragma once

#include "warpbo/box.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace warpbo {

// A test objective with known optimum, registered by name for the CLI.
struct Benchmark {
    std::string name;
    int dim = 0;
    Box box{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)};
    double known_min_value = 0.0;
    std::vector<Eigen::VectorXd> known_minimizers;
    std::function<double(const Eigen::VectorXd&)> fn;
};

// 1 - exp(-||x - mu||^2 / 2) with mu = (0.2, 0.2, 0.2).
double gaussian3d(const Eigen::VectorXd& x);

// Standard Branin function on x1 in [-5, 10], x2 in [0, 15].
double branin(const Eigen::VectorXd& x);

// Standard two-dimensional Levy function, minimum 0 at (1, 1).
double levy2d(const Eigen::VectorXd& x);

const std::vector<Benchmark>& benchmarks();

// Returns nullptr when no benchmark has that name.
const Benchmark* find_benchmark(const std::string& name);

} // namespace warpbo
