#pragma once

#include <stdexcept>
#include <string>

namespace sgdtheta {

/// Exponent outside the admissible range (norms need r >= 1, duality maps r > 1).
class InvalidExponentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidBatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bregman distance requested against a target with infinite penalty value.
class InfeasibleTargetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite intermediate detected; message carries the iteration context.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative linear solver failed to reach its tolerance within the cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sgdtheta
