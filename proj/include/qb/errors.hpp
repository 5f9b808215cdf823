#pragma once

#include <stdexcept>
#include <string>

namespace qb {

/// Caller broke a documented precondition (dimension mismatch, invalid
/// argument, violated invariant).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A matrix is too close to singular for the requested operation.
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A Riemannian step left the admissible region; the caller should shrink
/// the step and retry.
class StepTooLargeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A group is too large to enumerate; use alignment operations instead.
class EnumerationError : public ContractError {
public:
    using ContractError::ContractError;
};

/// Invalid run configuration (config file or CLI flags).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem read/write failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qb
