#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace idrkit {

/// Base class of every error raised by the library. `code()` is a short
/// machine-readable identifier used by the CLI error prefix.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* code() const noexcept { return "error"; }
};

class DomainError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "domain"; }
};

class EmptyInput : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "empty-input"; }
};

/// Component responsibility fell below the minimum effective size during EM.
class DegenerateComponent : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "degenerate-component"; }
};

class NumericalUnderflow : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "numerical-underflow"; }
};

class EmptyFile : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "empty-file"; }
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& reason)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + reason),
          line_(line), column_(column), reason_(reason) {}

    const char* code() const noexcept override { return "parse"; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string reason_;
};

}  // namespace idrkit
