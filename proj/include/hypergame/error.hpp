#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hypergame
{

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error
{
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " at " + std::to_string(line) + ":" + std::to_string(column)),
          line_(line), column_(column)
    {
    }

    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Well-formed input that violates a semantic constraint.
class ValidationError : public Error
{
public:
    using Error::Error;
};

// A construction exceeded its state budget.
class ResourceError : public Error
{
public:
    using Error::Error;
};

} // namespace hypergame
