#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "earoxi/errors.hpp"

namespace earoxi {

// Rejects unknown keys so file typos fail loudly instead of silently
// falling back to defaults.
inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                       const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok) raise(errc::invalid_config, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace earoxi
