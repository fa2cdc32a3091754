#pragma once

#include <stdexcept>
#include <string>

namespace pfl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates an operation's precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A computation could not be completed (non-finite state, resolution guard, fit failure).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Configuration text could not be parsed or failed validation.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// File could not be read or written, or had the wrong format.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace pfl
