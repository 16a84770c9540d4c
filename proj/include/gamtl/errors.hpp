#pragma once

#include <stdexcept>
#include <string>

namespace gamtl {

// Bad shapes, non-finite values, malformed configuration.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Evaluation outside the domain of a function, e.g. log of a zero degree.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A linear system that has no unique solution.
class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file that cannot be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gamtl
