#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace glyphdraw {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Matrix/tensor dimensions do not compose.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Non-finite value or failed numeric evaluation.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Gradient requested where it is undefined (norm at zero).
class SingularityError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Value outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Box or image geometry that violates canvas/ordering constraints.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Text that does not follow the layout grammar.
class FormatError : public Error {
public:
    FormatError(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

/// Unbalanced quoting in a caption.
class ParseError : public Error {
public:
    ParseError(std::size_t byte_offset, const std::string& what)
        : Error(what + " at byte " + std::to_string(byte_offset)), offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Not enough canvas to place the requested content.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Malformed or missing input data (files, records, pairs).
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace glyphdraw
