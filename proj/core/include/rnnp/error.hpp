#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rnnp {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument (bad spec, bad hyperparameter, unknown key).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Shapes that do not line up (matrix/vector sizes, flat parameter lengths).
class DimensionError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Input data that fails validation (gaps, duplicates, non-positive demand, parse errors).
class DataError : public Error {
public:
    using Error::Error;
};

/// A NaN/Inf appeared, an integer overflowed, or a computation became infeasible.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Non-finite value produced while processing step `step` of a sequence (1-based).
class NonFiniteError : public NumericError {
public:
    NonFiniteError(const std::string& where, std::size_t step)
        : NumericError(where + ": non-finite value at step " + std::to_string(step)), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace rnnp
