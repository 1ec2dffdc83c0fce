#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace magkerr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input lies outside the domain of an operation (negative power, bad parameters).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The two-YIG reduction divides by g1^2 g2^2; raised when either coupling vanishes.
class DegenerateCouplingError : public Error {
public:
    using Error::Error;
};

/// A denominator of a closed-form expression or a linear system vanished.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// A polariton frequency came out complex (overdamped regime).
class ComplexFrequencyError : public Error {
public:
    using Error::Error;
};

/// Root finding failed; carries the polynomial (ascending coefficients) for diagnosis.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> coefficients)
        : Error(what), coefficients_(std::move(coefficients)) {}

    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return coefficients_; }

private:
    std::vector<double> coefficients_;
};

/// A sweep reached a grid point without any stable steady state.
class SweepError : public Error {
public:
    using Error::Error;
};

/// Configuration text could not be parsed; line is 1-based, 0 when not tied to a line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace magkerr
