#pragma once

#include <stdexcept>
#include <string>

namespace actiboost {

// Bad configuration or API misuse. The CLI maps this to exit code 1.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable or malformed data, or data that violates an operation's
// precondition. The CLI maps this to exit code 2.
struct data_error : std::runtime_error {
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace actiboost
