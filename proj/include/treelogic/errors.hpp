#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treelogic {

// Base of every error raised by the library. The CLI maps subclasses to exit
// codes, so keep the hierarchy flat and meaningful.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class UnboundVariableError : public Error {
public:
  explicit UnboundVariableError(const std::string& name)
      : Error("unbound variable " + name), name_(name) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

// A fixpoint variable occurs under an odd number of negations below its binder.
class PositivityError : public Error {
public:
  explicit PositivityError(const std::string& name)
      : Error("variable " + name + " occurs negatively below its binder"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

class UnsupportedFeatureError : public Error {
public:
  UnsupportedFeatureError(const std::string& what, const std::string& token)
      : Error("unsupported " + what + ": '" + token + "'"), token_(token) {}
  const std::string& token() const noexcept { return token_; }

private:
  std::string token_;
};

// DTD / tree-type definitions that are syntactically fine but ill-formed.
class DefinitionError : public Error {
public:
  using Error::Error;
};

class NotCycleFreeError : public Error {
public:
  using Error::Error;
};

class ResourceLimitError : public Error {
public:
  using Error::Error;
};

// Broken internal invariant. Seeing one of these is always a bug.
class InternalError : public Error {
public:
  using Error::Error;
};

} // namespace treelogic
