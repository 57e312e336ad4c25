#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <utility>
#include <vector>

namespace warpbo {

// Axis-aligned search box [lo_0, hi_0] x ... x [lo_{d-1}, hi_{d-1}].
struct Box {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    Box() = default;

    Box(Eigen::VectorXd lower, Eigen::VectorXd upper)
        : lo(std::move(lower)), hi(std::move(upper)) {
        if (lo.size() != hi.size()) {
            throw std::invalid_argument("Box: lo/hi dimension mismatch");
        }
        for (Eigen::Index m = 0; m < lo.size(); ++m) {
            if (!(lo[m] < hi[m])) {
                throw std::invalid_argument("Box: requires lo < hi in every dimension");
            }
        }
    }

    static Box from_bounds(const std::vector<std::pair<double, double>>& bounds) {
        Eigen::VectorXd lo(static_cast<Eigen::Index>(bounds.size()));
        Eigen::VectorXd hi(static_cast<Eigen::Index>(bounds.size()));
        for (std::size_t m = 0; m < bounds.size(); ++m) {
            lo[static_cast<Eigen::Index>(m)] = bounds[m].first;
            hi[static_cast<Eigen::Index>(m)] = bounds[m].second;
        }
        return Box(std::move(lo), std::move(hi));
    }

    static Box unit(int dim) {
        return Box(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim));
    }

    int dim() const { return static_cast<int>(lo.size()); }

    double side(int m) const { return hi[m] - lo[m]; }

    double longest_side() const { return (hi - lo).maxCoeff(); }

    bool contains(const Eigen::VectorXd& x) const {
        if (x.size() != lo.size()) return false;
        return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
    }

    Eigen::VectorXd clamp(const Eigen::VectorXd& x) const {
        return x.cwiseMax(lo).cwiseMin(hi);
    }
};

} // namespace warpbo
