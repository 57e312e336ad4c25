#include "warpbo/external_objective.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <utility>

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace warpbo {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
    throw ObjectiveError(what + ": " + std::strerror(errno));
}

} // namespace

ExternalObjective::ExternalObjective(std::string command, double timeout_seconds)
    : command_(std::move(command)), timeout_seconds_(timeout_seconds) {
    if (command_.empty()) {
        throw ObjectiveError("external objective: empty command");
    }
    // A dead child must surface as EPIPE on write, not kill the process.
    static const auto ignore_sigpipe = signal(SIGPIPE, SIG_IGN);
    (void)ignore_sigpipe;
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0) throw_errno("external objective: pipe");
    if (pipe(from_child) != 0) {
        close(to_child[0]);
        close(to_child[1]);
        throw_errno("external objective: pipe");
    }
    pid_ = fork();
    if (pid_ < 0) {
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        throw_errno("external objective: fork");
    }
    if (pid_ == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    to_child_ = to_child[1];
    from_child_ = from_child[0];
}

ExternalObjective::~ExternalObjective() { terminate(); }

ExternalObjective::ExternalObjective(ExternalObjective&& other) noexcept
    : command_(std::move(other.command_)), timeout_seconds_(other.timeout_seconds_),
      pid_(other.pid_), to_child_(other.to_child_), from_child_(other.from_child_),
      buffer_(std::move(other.buffer_)) {
    other.pid_ = -1;
    other.to_child_ = -1;
    other.from_child_ = -1;
}

ExternalObjective& ExternalObjective::operator=(ExternalObjective&& other) noexcept {
    if (this != &other) {
        terminate();
        command_ = std::move(other.command_);
        timeout_seconds_ = other.timeout_seconds_;
        pid_ = other.pid_;
        to_child_ = other.to_child_;
        from_child_ = other.from_child_;
        buffer_ = std::move(other.buffer_);
        other.pid_ = -1;
        other.to_child_ = -1;
        other.from_child_ = -1;
    }
    return *this;
}

void ExternalObjective::close_pipes() noexcept {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    to_child_ = -1;
    from_child_ = -1;
}

void ExternalObjective::terminate() noexcept {
    close_pipes();
    if (pid_ > 0) {
        kill(pid_, SIGTERM);
        waitpid(pid_, nullptr, 0);
        pid_ = -1;
    }
}

std::string ExternalObjective::read_line() {
    for (;;) {
        const auto newline = buffer_.find('\n');
        if (newline != std::string::npos) {
            std::string line = buffer_.substr(0, newline);
            buffer_.erase(0, newline + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        pollfd pfd{from_child_, POLLIN, 0};
        const int timeout_ms = static_cast<int>(timeout_seconds_ * 1000.0);
        const int ready = poll(&pfd, 1, timeout_ms);
        if (ready == 0) {
            throw ObjectiveError("external objective: timed out after " +
                                 std::to_string(timeout_seconds_) + " s waiting for a reply");
        }
        if (ready < 0) {
            if (errno == EINTR) continue;
            throw_errno("external objective: poll");
        }
        char chunk[4096];
        const ssize_t n = read(from_child_, chunk, sizeof(chunk));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("external objective: read");
        }
        if (n == 0) {
            throw ObjectiveError("external objective: child closed its output (command: " +
                                 command_ + ")");
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

double ExternalObjective::operator()(const Eigen::VectorXd& x) {
    if (pid_ <= 0 || to_child_ < 0 || from_child_ < 0) {
        throw ObjectiveError("external objective: child is not running");
    }
    nlohmann::json request;
    request["x"] = std::vector<double>(x.data(), x.data() + x.size());
    std::string line = request.dump();
    line.push_back('\n');

    std::size_t written = 0;
    while (written < line.size()) {
        const ssize_t n = write(to_child_, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == EPIPE) {
                throw ObjectiveError("external objective: child closed its input");
            }
            throw_errno("external objective: write");
        }
        written += static_cast<std::size_t>(n);
    }

    const std::string reply = read_line();
    const char* begin = reply.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
    if (end == begin || (end && *end != '\0') || errno == ERANGE || !std::isfinite(value)) {
        throw ObjectiveError("external objective: unparseable or non-finite reply \"" + reply +
                             "\"");
    }
    return value;
}

} // namespace warpbo
