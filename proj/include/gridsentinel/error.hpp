#pragma once

#include <stdexcept>
#include <string>

namespace gridsentinel {

/// Input or model-consistency failure. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File-system or stream failure. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure inside a solver (singular system, no convergence).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gridsentinel
