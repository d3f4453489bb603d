#include "chemreward/grpo.hpp"

#include <cmath>

namespace chemreward {

bool zero_variance(std::span<const double> rewards) noexcept {
  for (double r : rewards) {
    if (r != rewards[0]) return false;
  }
  return true;
}

std::vector<double> advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) throw Error("group_too_small", "advantages need at least two rollouts per group");
  for (double r : rewards) {
    if (!std::isfinite(r)) throw Error("invalid_argument", "rewards must be finite");
  }
  const double n = static_cast<double>(rewards.size());
  double mean = 0;
  for (double r : rewards) mean += r;
  mean /= n;
  // Second pass corrects the rounding left in the first mean.
  double drift = 0;
  for (double r : rewards) drift += r - mean;
  mean += drift / n;

  double var = 0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double denom = std::sqrt(var / n) + kAdvantageEpsilon;

  std::vector<double> out(rewards.size(), 0.0);
  if (zero_variance(rewards)) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / denom;
  return out;
}

FilterResult dynamic_filter(std::vector<RolloutGroup> groups) {
  FilterResult res;
  auto& zero = res.report.dropped["zero_variance"];
  for (auto& g : groups) {
    if (zero_variance(g.rewards)) {
      ++zero;
    } else {
      res.kept.push_back(std::move(g));
    }
  }
  res.report.kept = res.kept.size();
  return res;
}

}  // namespace chemreward
