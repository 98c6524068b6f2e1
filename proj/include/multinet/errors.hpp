#pragma once

#include <stdexcept>
#include <string>

namespace multinet {

/// Base for every error the toolkit raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: negative weights, bad shapes, duplicate ids.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Network too small or too empty for the requested quantity.
class DegenerateNetworkError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Unknown layer, node or period identifier.
class LookupError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A statistic whose value is mathematically undefined for this input
/// (zero variance, zero total weight, complete graph...).
class UndefinedError : public Error {
public:
    using Error::Error;
};

class InsufficientSampleError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace multinet
