#include "chemreward/engine.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>

#include "chemreward/text.hpp"

namespace chemreward {

namespace {

template <typename T>
bool parse_int(std::string_view s, T& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

BindAddress parse_bind_address(std::string_view text) {
  const auto colon = text.rfind(':');
  BindAddress b;
  if (colon == std::string_view::npos || colon == 0 || !parse_int(text.substr(colon + 1), b.port) || b.port < 0 ||
      b.port > 65535) {
    throw Error("config_error", "bind address must be host:port, got '" + std::string(text) + "'");
  }
  b.host = std::string(text.substr(0, colon));
  return b;
}

EngineConfig EngineConfig::parse(std::string_view text_in, std::string_view source) {
  EngineConfig cfg;
  std::size_t line_no = 0, start = 0;
  auto fail = [&](const std::string& msg) -> Error {
    return Error("config_error", std::string(source) + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (start < text_in.size()) {
    auto end = text_in.find('\n', start);
    if (end == std::string_view::npos) end = text_in.size();
    const auto line = text::trim(text_in.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw fail("expected 'key = value'");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string value(text::trim(line.substr(eq + 1)));
    auto integer = [&](int& field) {
      if (!parse_int(std::string_view(value), field)) throw fail(key + " must be an integer");
    };
    if (key == "fingerprint_radius") {
      integer(cfg.fingerprint_radius);
    } else if (key == "fingerprint_width") {
      integer(cfg.fingerprint_width);
    } else if (key == "top_k") {
      integer(cfg.top_k);
    } else if (key == "rollout_count") {
      integer(cfg.rollout_count);
    } else if (key == "threads") {
      integer(cfg.threads);
    } else if (key == "seed") {
      if (!parse_int(std::string_view(value), cfg.seed)) throw fail("seed must be a non-negative integer");
    } else if (key == "reward_config") {
      cfg.reward_config = value;
    } else if (key == "task_catalog") {
      cfg.task_catalog = value;
    } else if (key == "store") {
      cfg.store = value;
    } else if (key == "bind_address") {
      cfg.bind_address = value;
    } else {
      throw fail("unknown key '" + key + "'");
    }
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error("config_error", std::string(source) + ": " + e.what());
  }
  return cfg;
}

EngineConfig EngineConfig::load(const std::string& path) {
  auto cfg = parse(text::read_file(path), path);
  // Relative paths are relative to the config file, not the working directory.
  const auto base = std::filesystem::path(path).parent_path();
  for (auto* field : {&cfg.reward_config, &cfg.task_catalog, &cfg.store}) {
    if (!field->empty() && std::filesystem::path(*field).is_relative()) *field = (base / *field).string();
  }
  return cfg;
}

EngineConfig EngineConfig::resolve(const std::optional<std::string>& explicit_path) {
  EngineConfig cfg;
  if (explicit_path) {
    cfg = load(*explicit_path);
  } else if (const char* env = std::getenv(kConfigPathEnv); env && *env) {
    cfg = load(env);
  }
  if (const char* bind = std::getenv(kBindAddressEnv); bind && *bind) {
    cfg.bind_address = bind;
    cfg.validate();
  }
  return cfg;
}

void EngineConfig::validate() const {
  if (fingerprint_radius < 0 || fingerprint_radius > 8) throw Error("config_error", "fingerprint_radius must be 0..8");
  if (fingerprint_width < 64 || (fingerprint_width & (fingerprint_width - 1)) != 0) {
    throw Error("config_error", "fingerprint_width must be a power of two >= 64");
  }
  if (top_k < 1) throw Error("config_error", "top_k must be >= 1");
  if (rollout_count < 2) throw Error("config_error", "rollout_count must be >= 2");
  if (threads < 1 || threads > 256) throw Error("config_error", "threads must be 1..256");
  parse_bind_address(bind_address);
}

std::string EngineConfig::dump() const {
  std::string out;
  auto kv = [&](const char* k, const std::string& v) { out.append(k).append(" = ").append(v).push_back('\n'); };
  kv("fingerprint_radius", std::to_string(fingerprint_radius));
  kv("fingerprint_width", std::to_string(fingerprint_width));
  kv("top_k", std::to_string(top_k));
  kv("rollout_count", std::to_string(rollout_count));
  kv("reward_config", reward_config);
  kv("task_catalog", task_catalog);
  kv("store", store);
  kv("bind_address", bind_address);
  kv("seed", std::to_string(seed));
  kv("threads", std::to_string(threads));
  return out;
}

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
  config_.validate();
  reward_ = config_.reward_config.empty()
                ? std::shared_ptr<const RewardConfig>(&RewardConfig::builtin(), [](const RewardConfig*) {})
                : std::make_shared<const RewardConfig>(RewardConfig::load(config_.reward_config));
  catalog_ = config_.task_catalog.empty()
                 ? std::shared_ptr<const TaskCatalog>(&TaskCatalog::builtin(), [](const TaskCatalog*) {})
                 : std::make_shared<const TaskCatalog>(TaskCatalog::load(config_.task_catalog));
  if (!config_.store.empty()) {
    auto store = ExampleStore::load(config_.store);
    if (store.radius() != config_.fingerprint_radius || store.width() != config_.fingerprint_width) {
      throw Error("config_error", "store " + config_.store + " was built with radius " + std::to_string(store.radius()) +
                                      " and width " + std::to_string(store.width()) +
                                      ", config asks for " + std::to_string(config_.fingerprint_radius) + "/" +
                                      std::to_string(config_.fingerprint_width));
    }
    store_ = std::make_shared<const ExampleStore>(std::move(store));
  }
}

std::vector<FewShotExample> Engine::retrieve_fewshot(std::string_view smiles, std::string_view task) const {
  std::vector<FewShotExample> out;
  if (!store_ || task.empty() || !store_->has_task(task)) return out;
  for (const auto& hit : store_->top_k(parse_smiles(smiles), config_.top_k, task)) {
    const auto& rec = store_->records()[hit.record];
    out.push_back({rec.smiles, rec.label});
  }
  return out;
}

}  // namespace chemreward
