#pragma once

#include <stdexcept>
#include <string>

namespace girnet {

/// Shape disagreement between operands (reports both shapes in the message).
class DimensionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An API precondition was violated by the caller.
class ContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value or combination.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent data (corpus files, labels out of range, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Checkpoint does not match the model it is being loaded into.
class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Loss became non-finite during training.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg, long step = -1)
        : std::runtime_error(msg), step_index(step) {}
    long step_index;
};

} // namespace girnet
