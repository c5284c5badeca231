#pragma once

#include <stdexcept>
#include <string>

namespace conekernel {

/// Invalid input: a violated precondition or malformed configuration.
/// `code()` is a stable machine-readable tag (e.g. "NOT_SPD", "OUTSIDE_DOMAIN").
class InputError : public std::invalid_argument {
public:
    InputError(std::string code, const std::string& message)
        : std::invalid_argument(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// A numerical procedure failed to converge or to bracket a root.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace conekernel
