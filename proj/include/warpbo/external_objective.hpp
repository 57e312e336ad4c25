#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

#include <sys/types.h>

namespace warpbo {

struct ObjectiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bridge to a black-box objective running as a child process. The child is
// spawned once and queried over its standard streams: one request line
// {"x": [v0, ..., v_{d-1}]} per evaluation, one decimal float line back.
class ExternalObjective {
public:
    explicit ExternalObjective(std::string command, double timeout_seconds = 3600.0);
    ~ExternalObjective();

    ExternalObjective(ExternalObjective&& other) noexcept;
    ExternalObjective& operator=(ExternalObjective&& other) noexcept;
    ExternalObjective(const ExternalObjective&) = delete;
    ExternalObjective& operator=(const ExternalObjective&) = delete;

    // Throws ObjectiveError on an unparseable or non-finite reply, child
    // exit, or timeout.
    double operator()(const Eigen::VectorXd& x);

    const std::string& command() const { return command_; }

private:
    void close_pipes() noexcept;
    void terminate() noexcept;
    std::string read_line();

    std::string command_;
    double timeout_seconds_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

} // namespace warpbo
