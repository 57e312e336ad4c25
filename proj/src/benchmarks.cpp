#include "warpbo/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace warpbo {

namespace {

void require_dim(const Eigen::VectorXd& x, Eigen::Index d, const char* name) {
    if (x.size() != d) {
        throw std::invalid_argument(std::string(name) + ": expected a vector of size " +
                                    std::to_string(d));
    }
}

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Eigen::VectorXd vec3(double a, double b, double c) {
    Eigen::VectorXd v(3);
    v << a, b, c;
    return v;
}

std::vector<Benchmark> make_benchmarks() {
    const double pi = std::numbers::pi;
    std::vector<Benchmark> all;

    all.push_back({"gaussian3d", 3,
                   Box{vec3(-2.0, -2.0, -2.0), vec3(2.0, 2.0, 2.0)},
                   0.0,
                   {vec3(0.2, 0.2, 0.2)},
                   gaussian3d});

    all.push_back({"branin", 2,
                   Box{vec2(-5.0, 0.0), vec2(10.0, 15.0)},
                   1.25 / pi,
                   {vec2(pi, 2.275), vec2(-pi, 12.275), vec2(3.0 * pi, 2.475)},
                   branin});

    all.push_back({"levy2d", 2,
                   Box{vec2(-10.0, -10.0), vec2(10.0, 10.0)},
                   0.0,
                   {vec2(1.0, 1.0)},
                   levy2d});

    return all;
}

} // namespace

double gaussian3d(const Eigen::VectorXd& x) {
    require_dim(x, 3, "gaussian3d");
    const Eigen::Vector3d mu(0.2, 0.2, 0.2);
    return 1.0 - std::exp(-0.5 * (x - mu).squaredNorm());
}

double branin(const Eigen::VectorXd& x) {
    require_dim(x, 2, "branin");
    const double pi = std::numbers::pi;
    const double a = 1.0;
    const double b = 5.1 / (4.0 * pi * pi);
    const double c = 5.0 / pi;
    const double r = 6.0;
    const double s = 10.0;
    const double t = 1.0 / (8.0 * pi);
    const double term = x[1] - b * x[0] * x[0] + c * x[0] - r;
    return a * term * term + s * (1.0 - t) * std::cos(x[0]) + s;
}

double levy2d(const Eigen::VectorXd& x) {
    require_dim(x, 2, "levy2d");
    const double pi = std::numbers::pi;
    const double w1 = 1.0 + (x[0] - 1.0) / 4.0;
    const double w2 = 1.0 + (x[1] - 1.0) / 4.0;
    const double s1 = std::sin(pi * w1);
    const double s2 = std::sin(2.0 * pi * w2);
    const double sw1 = std::sin(pi * w1 + 1.0);
    return s1 * s1 + (w1 - 1.0) * (w1 - 1.0) * (1.0 + 10.0 * sw1 * sw1) +
           (w2 - 1.0) * (w2 - 1.0) * (1.0 + s2 * s2);
}

const std::vector<Benchmark>& benchmarks() {
    static const std::vector<Benchmark> all = make_benchmarks();
    return all;
}

const Benchmark* find_benchmark(const std::string& name) {
    for (const auto& b : benchmarks()) {
        if (b.name == name) return &b;
    }
    return nullptr;
}

} // namespace warpbo
