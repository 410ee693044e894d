#pragma once

#include <initializer_list>
#include <string>

#include "aerharvest/errors.hpp"
#include "json.hpp"

namespace aerharvest {

// Rejects unknown keys so config typos fail loudly instead of silently
// falling back to defaults.
inline void require_keys(const nlohmann::json& obj,
                         std::initializer_list<const char*> allowed,
                         const std::string& context) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw UsageError("unknown key \"" + item.key() + "\" in " + context);
    }
  }
}

}  // namespace aerharvest
