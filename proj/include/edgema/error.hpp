#pragma once

#include <stdexcept>
#include <string>

namespace edgema {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Reading or writing an artifact failed.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input at a known line of a text file.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A numerical routine could not produce a finite answer.
class NumericalError : public Error {
public:
    using Error::Error;
};

namespace detail {
inline void require(bool condition, const char* message) {
    if (!condition) throw InvalidArgument(message);
}
}  // namespace detail

}  // namespace edgema
