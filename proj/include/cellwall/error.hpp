#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cellwall {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violates an operation's precondition (radius out of range,
/// negative density, non-positive-definite coefficient, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative solve stopped before reaching its tolerance.
class SolverError : public Error {
public:
    SolverError(const std::string& what, int iterations, double residual)
        : Error(what), iterations_(iterations), residual_(residual) {}

    int iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    int iterations_;
    double residual_;
};

/// Constraint functionals are linearly dependent or do not fix the kernel.
class ConstraintError : public Error {
public:
    using Error::Error;
};

/// Configuration validation failure; carries every problem found, each
/// prefixed with its key path.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : Error(join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const { return problems_; }

private:
    static std::string join(const std::vector<std::string>& problems) {
        std::string out = "invalid configuration:";
        for (const auto& p : problems) out += "\n  " + p;
        return out;
    }
    std::vector<std::string> problems_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace cellwall
