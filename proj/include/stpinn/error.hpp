#pragma once

#include <stdexcept>
#include <string>

namespace stpinn {

/// Caller violated a precondition (bad order, empty batch, unknown id, ...).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An elementary operation was evaluated outside its differentiable domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A loss, gradient or parameter became NaN or infinite during training.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be read, written or decoded.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace stpinn
