#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scriptor {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based; 0 when no line applies.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed value outside its permitted domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Recording too short to segment.
class DegenerateRecording : public Error {
public:
    using Error::Error;
};

/// A feature category cannot be computed for the given recording.
class FeatureUndefined : public Error {
public:
    using Error::Error;
};

/// A statistical cell lacks the group sizes it needs.
class InsufficientData : public Error {
public:
    using Error::Error;
};

}  // namespace scriptor
