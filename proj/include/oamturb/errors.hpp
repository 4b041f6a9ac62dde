#pragma once

#include <stdexcept>
#include <string>

namespace oamturb {

/// Input outside the mathematical domain of an operation (negative radius, l0 = 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid numerical configuration, e.g. a sampling count that violates an aliasing
/// or resolution guard.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its tolerance. Carries the last residual.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace oamturb
