#pragma once

#include <stdexcept>
#include <string>

namespace qitags {

// Malformed or inconsistent user input (instance files, flags, dimensions).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidInput(what);
}

inline void expects(bool cond, const std::string& what) {
  if (!cond) throw ContractViolation(what);
}

// Absolute tolerance used for every floating comparison in the solver.
inline constexpr double kTolerance = 1e-9;

}  // namespace qitags
