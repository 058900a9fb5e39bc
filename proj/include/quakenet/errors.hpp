#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quakenet {

// Every failure the library reports derives from Error. The CLI maps the
// three families onto exit codes: UsageError -> 1, InputError -> 2,
// DomainError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid invocation or configuration (unknown keys, bad option values).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent data (records, weight files, dimensions).
class InputError : public Error {
public:
    using Error::Error;
};

/// Token-level parse failure, carrying the 1-based line number.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Structurally valid file whose declared layout does not match its content.
class FormatError : public InputError {
public:
    using InputError::InputError;
};

/// Numerically invalid parameter (non-positive frequency, negative damping...).
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace quakenet
