#pragma once

#include <stdexcept>
#include <string>

namespace aerharvest {

// Bad input from the user: malformed map/config files, invalid CLI values.
// The CLI maps this to exit code 2; everything else lands on exit code 1.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace aerharvest
