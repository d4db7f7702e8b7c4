#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fedfem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed mesh text. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Structurally or geometrically invalid mesh (bad index, degenerate element, duplicate set).
class MeshError : public Error {
public:
    using Error::Error;
};

/// Invalid material tables or tensors.
class MaterialError : public Error {
public:
    using Error::Error;
};

/// Invalid boundary-condition records or solver inputs.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Instability or an unphysical state encountered while stepping.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace fedfem
