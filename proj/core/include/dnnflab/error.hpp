#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dnnflab {

// Root of the library's exception hierarchy. The CLI maps subclasses onto
// exit codes, so keep the split between "bad input" and "too big" intact.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Input is well-formed but exceeds a desk-scale limit (enumeration caps,
// parameter schedules that do not fit, constructions needing larger h or k).
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Malformed text input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Two operands of a disjoint product share a variable.
class VariableCollision : public Error {
 public:
  using Error::Error;
};

// Circuit structure is broken (dangling child index, cycle).
class StructuralError : public Error {
 public:
  StructuralError(const std::string& what, std::size_t node)
      : Error("node " + std::to_string(node) + ": " + what), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

}  // namespace dnnflab
