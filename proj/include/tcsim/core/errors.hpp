#pragma once

#include <stdexcept>
#include <string>

namespace tcsim {

// Raised when a caller violates an operation's documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when a computation produces non-finite or inconsistent numbers.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace tcsim
