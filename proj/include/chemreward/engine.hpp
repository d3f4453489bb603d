#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemreward/promptkit.hpp"
#include "chemreward/retrieval.hpp"
#include "chemreward/reward.hpp"

namespace chemreward {

inline constexpr const char* kConfigPathEnv = "CHEMREWARD_CONFIG";
inline constexpr const char* kBindAddressEnv = "CHEMREWARD_BIND";

struct BindAddress {
  std::string host;
  int port = 0;
};

/// "host:port"; port 0 asks for any free port. Throws Error("config_error").
BindAddress parse_bind_address(std::string_view text);

/// Engine settings. Empty paths select the compiled-in defaults.
struct EngineConfig {
  int fingerprint_radius = kDefaultFingerprintRadius;
  int fingerprint_width = kDefaultFingerprintWidth;
  int top_k = kDefaultTopK;
  int rollout_count = 5;
  std::string reward_config;  // reward.conf path
  std::string task_catalog;   // directory of <task>.txt
  std::string store;          // example store for few-shot retrieval
  std::string bind_address = "127.0.0.1:8765";
  std::uint64_t seed = 0;
  int threads = 4;

  /// key = value lines, '#' comments. Unknown keys and bad values raise
  /// Error("config_error", "<source>:<line>: ...").
  static EngineConfig parse(std::string_view text, std::string_view source = "engine.conf");
  /// Relative paths inside the file are taken relative to its directory.
  static EngineConfig load(const std::string& path);

  /// Config path from `explicit_path`, else $CHEMREWARD_CONFIG, else the
  /// defaults; $CHEMREWARD_BIND then overrides bind_address.
  static EngineConfig resolve(const std::optional<std::string>& explicit_path);

  /// Range checks on the numeric fields. Throws Error("config_error").
  void validate() const;
  std::string dump() const;

  bool operator==(const EngineConfig&) const = default;
};

/// Everything a request needs, loaded once. Every configured path is read
/// in the constructor so a bad path fails at startup, never mid-request.
class Engine {
 public:
  explicit Engine(EngineConfig config);

  const EngineConfig& config() const noexcept { return config_; }
  const RewardConfig& reward_config() const noexcept { return *reward_; }
  const TaskCatalog& catalog() const noexcept { return *catalog_; }
  /// Null when no store is configured.
  const ExampleStore* store() const noexcept { return store_.get(); }

  /// Top-k store neighbours of `smiles` within `task`; empty without a
  /// store, a task, or when the store has no rows for it.
  std::vector<FewShotExample> retrieve_fewshot(std::string_view smiles, std::string_view task) const;

 private:
  EngineConfig config_;
  std::shared_ptr<const RewardConfig> reward_;
  std::shared_ptr<const TaskCatalog> catalog_;
  std::shared_ptr<const ExampleStore> store_;
};

}  // namespace chemreward
