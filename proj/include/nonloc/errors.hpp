#pragma once

#include <stdexcept>
#include <string>

namespace nonloc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent run description (bad family parameters, malformed
// config, unknown keys). Maps to CLI exit code 1.
struct ConfigError : Error {
    using Error::Error;
};

// Numerical failure: non-convergent quadrature or iteration, singular or
// ill-conditioned system, hypothesis violations that prevent a solve.
// Maps to CLI exit code 2.
struct NumericError : Error {
    using Error::Error;
};

struct QuadratureError : NumericError {
    QuadratureError(const std::string& what, double achieved)
        : NumericError(what), achieved_estimate(achieved) {}
    double achieved_estimate;
};

struct DegenerateKernelError : NumericError {
    using NumericError::NumericError;
};

// Filesystem problems while emitting results. Maps to CLI exit code 3.
struct IoError : Error {
    using Error::Error;
};

}  // namespace nonloc
