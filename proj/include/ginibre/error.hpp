#pragma once

#include <stdexcept>
#include <string>

namespace ginibre {

/// Raised when an argument lies outside an operation's domain
/// (negative shape, inverted window, unsupported order, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a computation cannot deliver its accuracy contract:
/// divergent expectations, eigensolver non-convergence, non-finite results.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
[[noreturn]] inline void domain_fail(const std::string& what) { throw DomainError(what); }
[[noreturn]] inline void numerical_fail(const std::string& what) { throw NumericalError(what); }
}  // namespace detail

}  // namespace ginibre
