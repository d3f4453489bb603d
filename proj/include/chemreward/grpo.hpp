#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chemreward/reward.hpp"

namespace chemreward {

/// Added to the population standard deviation before dividing.
inline constexpr double kAdvantageEpsilon = 1e-8;
inline constexpr int kDefaultRolloutCount = 5;

struct RolloutGroup {
  std::string prompt_id;
  std::vector<double> rewards;
  std::vector<RewardBreakdown> breakdowns;  // optional, parallel to rewards

  bool operator==(const RolloutGroup&) const = default;
};

/// (r_i - mean) / (population std + kAdvantageEpsilon).
/// Throws Error("group_too_small") for fewer than two rewards and
/// Error("invalid_argument") for non-finite rewards.
std::vector<double> advantages(std::span<const double> rewards);
inline std::vector<double> advantages(const RolloutGroup& group) { return advantages(group.rewards); }

/// True when every reward equals the first one.
bool zero_variance(std::span<const double> rewards) noexcept;

struct FilterReport {
  std::size_t kept = 0;
  std::map<std::string, std::size_t> dropped;  // reason -> count; "zero_variance"

  bool operator==(const FilterReport&) const = default;
};

struct FilterResult {
  std::vector<RolloutGroup> kept;
  FilterReport report;
};

/// Drops groups that carry no learning signal. Order of kept groups is
/// preserved, so filtering twice changes nothing.
FilterResult dynamic_filter(std::vector<RolloutGroup> groups);

}  // namespace chemreward
