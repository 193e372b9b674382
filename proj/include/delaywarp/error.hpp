#pragma once

#include <stdexcept>
#include <string>

namespace delaywarp {

/// Base class for every error raised by the library. `code()` is a stable
/// machine-readable identifier used by the CLI when emitting error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    [[nodiscard]] const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// A denominator 1 - exp(-j k w tau0) came too close to zero.
class ResonanceError : public Error {
public:
    explicit ResonanceError(const std::string& what) : Error("resonance", what) {}
};

/// Evaluation requested outside the domain where an object is defined.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

/// An object violates one of its structural invariants.
class ConstraintError : public Error {
public:
    explicit ConstraintError(const std::string& what) : Error("constraint", what) {}
};

/// Iterative solver failed (bracket, iteration budget, conditioning).
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error("numerical", what) {}
};

/// Malformed configuration or input file.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

} // namespace delaywarp
