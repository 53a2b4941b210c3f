// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace analogia {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor shapes do not conform for an operation.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an operation (empty time axis, non-finite value, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A precondition of a call was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Object used in a state that does not allow the call (e.g. a consumed tape).
class StateError : public Error {
public:
    using Error::Error;
};

/// Inconsistent configuration (dimension mismatch between files, bad flag values).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the file name and 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), file_(std::move(file)), line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// Optimization diverged or received non-finite gradients.
class TrainingError : public Error {
public:
    using Error::Error;
};

}  // namespace analogia
