#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace rfem {

/// Compact number formatting for messages.
inline std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Base for everything the library throws. The CLI maps ConfigError to exit
// code 2 and NumericalError to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class InvalidInput : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class Unsupported : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

/// A mesh element shorter than the minimum admissible length.
class DegenerateMesh : public NumericalError {
public:
    DegenerateMesh(const std::string& what, int element)
        : NumericalError(what), element_(element) {}
    int element() const noexcept { return element_; }

private:
    int element_;
};

/// Cholesky pivot failure or CG non-convergence. Carries the best residual seen.
class SingularSystem : public NumericalError {
public:
    SingularSystem(const std::string& what, double residual)
        : NumericalError(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Candidate energy below the reference energy by more than roundoff.
class InconsistentReference : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Non-parametric run stopped on a degenerate mesh at `iteration`.
class TrainingAborted : public NumericalError {
public:
    TrainingAborted(const std::string& what, int iteration)
        : NumericalError(what), iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

/// Balanced energy requested with a zero uniform-mesh reference.
class DegenerateProblem : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace rfem
