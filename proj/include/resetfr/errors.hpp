#pragma once

#include <stdexcept>
#include <string>

namespace resetfr {

// Base class for every failure raised by the library. The CLI maps the
// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A matrix that must be inverted is singular (or numerically so).
class SingularityError : public Error {
public:
    using Error::Error;
};

// A quantity left its representable or admissible range.
class RangeError : public Error {
public:
    using Error::Error;
};

// Malformed model or argument.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Simulation did not settle onto a periodic steady state.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// Two reset events closer than the Zeno guard allows.
class ZenoError : public Error {
public:
    using Error::Error;
};

// State norm blew past the divergence guard.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// A standing assumption of the analysis does not hold for this system.
class AssumptionViolation : public Error {
public:
    using Error::Error;
};

}  // namespace resetfr
