#ifndef FVKIT_ERROR_HPP
#define FVKIT_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fvkit {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; carries a 1-based source location when known.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(line == 0 ? what
                        : std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// A value violates a type invariant (bad arity, tuple out of range, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A configured resource ceiling would be exceeded.
class CeilingError : public Error {
public:
  using Error::Error;
};

/// An operation was called outside its precondition.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// A bounded search ran out of budget without finding what it looked for.
class BudgetError : public Error {
public:
  using Error::Error;
};

} // namespace fvkit

#endif
