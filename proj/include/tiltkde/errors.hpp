#pragma once

#include <stdexcept>
#include <string>

namespace tiltkde {

// Base for all library errors. kind() is the stable machine-readable name
// the CLI prints next to exit code 1.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct InvalidInput : Error {
    explicit InvalidInput(const std::string& message) : Error("invalid-input", message) {}
};

struct InvalidConfig : Error {
    explicit InvalidConfig(const std::string& message) : Error("invalid-config", message) {}
};

struct InvalidPlan : Error {
    explicit InvalidPlan(const std::string& message) : Error("invalid-plan", message) {}
};

struct UnsupportedDerivative : Error {
    explicit UnsupportedDerivative(const std::string& message)
        : Error("unsupported-derivative", message) {}
};

struct TiltOverflow : Error {
    explicit TiltOverflow(const std::string& message) : Error("tilt-overflow", message) {}
};

struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& message)
        : Error("quadrature-failure", message) {}
};

struct IoError : Error {
    explicit IoError(const std::string& message) : Error("io-error", message) {}
};

} // namespace tiltkde
