#pragma once

#include <stdexcept>
#include <string>

namespace cuechaos {

// Bad input to an operation (sizes, ranges, mismatched objects).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical route could not reach its accuracy target.
class PrecisionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation point lies on a declared branch cut.
class BranchCutError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Symbol is not admissible for the requested operation (e.g. deformation
// leaves the positive half line).
class InvalidSymbol : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Two independent routes to the same quantity disagree.
class ConsistencyAlarm : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cuechaos
