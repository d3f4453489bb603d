#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace chemreward::resources {

/// A data file from data/ compiled into the library.
struct Resource {
  std::string_view name;     // path relative to data/, e.g. "features.lib"
  std::string_view content;
};

std::span<const Resource> all() noexcept;

inline std::optional<std::string_view> find(std::string_view name) noexcept {
  for (const auto& r : all()) {
    if (r.name == name) return r.content;
  }
  return std::nullopt;
}

}  // namespace chemreward::resources
