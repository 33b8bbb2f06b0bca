#pragma once

#include <stdexcept>
#include <string>

namespace twoweight {

/// Raised when an operation receives arguments outside its domain
/// (bad measure parameters, mismatched dimensions, alpha out of range, ...).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace twoweight
