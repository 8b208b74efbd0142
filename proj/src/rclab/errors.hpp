#pragma once

#include <stdexcept>
#include <string>

namespace rclab {

// Precondition or schema violation by the caller.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input is well formed but outside the domain where the quantity is defined
// (p at an endpoint for a derivative, a vacuous bound, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A configured size cap (vertex count, enumeration edge count) was exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rclab
