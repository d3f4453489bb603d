#pragma once

#include <optional>
#include <string_view>

namespace chemreward {

struct ElementInfo {
  std::string_view symbol;
  int atomic_number;
  double mass;  // standard atomic weight, g/mol
};

/// Looks up an element by its capitalized symbol ("C", "Cl", "Se").
std::optional<ElementInfo> find_element(std::string_view symbol) noexcept;

/// Looks up by atomic number; nullopt outside the table.
std::optional<ElementInfo> element_by_number(int atomic_number) noexcept;

inline constexpr double kHydrogenMass = 1.008;

}  // namespace chemreward
