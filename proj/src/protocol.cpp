#include "chemreward/protocol.hpp"

#include <algorithm>
#include <future>
#include <set>

#include "chemreward/text.hpp"
#include "chemreward/version.hpp"
#include "json.hpp"

namespace chemreward {

namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

// Raised while decoding a request; becomes an error object.
struct BadRequest {
  std::string code;
  std::string message;
};

[[noreturn]] void bad(const std::string& message) { throw BadRequest{"invalid_request", message}; }

void check_keys(const json& obj, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      bad("unknown field '" + key + "'");
    }
  }
}

void check_version(const json& obj) {
  auto it = obj.find("protocol_version");
  if (it == obj.end()) return;
  if (!it->is_number_integer() || it->get<long long>() != kProtocolVersion) {
    throw BadRequest{"protocol_mismatch", "server speaks protocol_version " + std::to_string(kProtocolVersion)};
  }
}

std::string required_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) bad(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

bool label_value(const json& v, const char* what) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    if (auto b = text::parse_label(v.get<std::string>())) return *b;
  }
  bad(std::string("'") + what + "' must be true/false or \"True\"/\"False\"");
}

// The id is echoed exactly as sent; anything but a string, number or null is refused.
std::string id_of(const json& obj) {
  auto it = obj.find("id");
  if (it == obj.end() || it->is_null()) return "null";
  if (!it->is_string() && !it->is_number()) bad("'id' must be a string or a number");
  return it->dump();
}

std::string error_line(const std::string& id_json, const std::string& code, const std::string& message,
                       std::size_t line_no) {
  ojson err = {{"code", code}, {"message", message}, {"line", line_no}};
  return "{\"id\":" + id_json + ",\"error\":" + err.dump() + ",\"protocol_version\":" +
         std::to_string(kProtocolVersion) + "}";
}

RewardRequest decode_reward(const Engine& engine, const json& obj) {
  check_keys(obj, {"id", "task", "smiles", "label", "response", "fewshot", "weights", "protocol_version"});
  check_version(obj);
  RewardRequest req;
  req.molecule = required_string(obj, "smiles");
  auto lab = obj.find("label");
  if (lab == obj.end()) bad("'label' is required");
  req.label = label_value(*lab, "label");
  req.response_text = required_string(obj, "response");

  std::string task;
  if (auto it = obj.find("task"); it != obj.end()) {
    if (!it->is_string()) bad("'task' must be a string");
    task = it->get<std::string>();
  }
  if (auto it = obj.find("fewshot"); it != obj.end()) {
    if (!it->is_array()) bad("'fewshot' must be an array");
    for (const auto& ex : *it) {
      if (!ex.is_object()) bad("few-shot entries must be objects");
      check_keys(ex, {"smiles", "label"});
      auto l = ex.find("label");
      if (l == ex.end()) bad("few-shot entries need a label");
      req.fewshot.push_back({required_string(ex, "smiles"), label_value(*l, "fewshot label")});
    }
  } else {
    req.fewshot = engine.retrieve_fewshot(req.molecule, task);
  }
  if (auto it = obj.find("weights"); it != obj.end()) {
    if (!it->is_object()) bad("'weights' must be an object");
    check_keys(*it, {"lambda1", "lambda2", "lambda3"});
    RewardWeights w = engine.reward_config().weights;
    for (auto [key, field] : {std::pair{"lambda1", &w.lambda1}, {"lambda2", &w.lambda2}, {"lambda3", &w.lambda3}}) {
      if (auto v = it->find(key); v != it->end()) {
        if (!v->is_number()) bad(std::string("'") + key + "' must be a number");
        *field = v->get<double>();
      }
    }
    req.weights = w;
  }
  return req;
}

template <typename Fn>
std::string guarded(std::string_view line, std::size_t line_no, Fn&& fn) {
  std::string id = "null";
  try {
    const auto obj = json::parse(line);
    if (!obj.is_object()) throw BadRequest{"invalid_request", "request must be a JSON object"};
    id = id_of(obj);
    return fn(obj, id);
  } catch (const json::parse_error& e) {
    return error_line(id, "malformed_json", e.what(), line_no);
  } catch (const BadRequest& e) {
    return error_line(id, e.code, e.message, line_no);
  } catch (const json::exception& e) {
    return error_line(id, "invalid_request", e.what(), line_no);
  } catch (const Error& e) {
    return error_line(id, e.code(), e.what(), line_no);
  } catch (const std::exception& e) {
    return error_line(id, "internal_error", e.what(), line_no);
  }
}

}  // namespace

std::string breakdown_line(std::string_view id_json, const RewardBreakdown& b) {
  ojson out = {{"r_ans", b.r_ans},   {"r_fmt", b.r_fmt},       {"r_cons", b.r_cons}, {"r_comp", b.r_comp},
               {"r_prin", b.r_prin}, {"r_struct", b.r_struct}, {"r_total", b.r_total}};
  out["answer"] = b.answer ? ojson(*b.answer ? "True" : "False") : ojson(nullptr);
  out["format_ok"] = b.format_ok;
  out["protocol_version"] = kProtocolVersion;
  // id goes first and is spliced in verbatim.
  return "{\"id\":" + std::string(id_json) + "," + out.dump().substr(1);
}

std::string handle_reward_line(const Engine& engine, std::string_view line, std::size_t line_no) {
  return guarded(line, line_no, [&](const json& obj, const std::string& id) {
    if (obj.contains("rewards")) bad("advantage groups go to the advantages endpoint");
    return breakdown_line(id, total_reward(decode_reward(engine, obj), engine.reward_config()));
  });
}

std::string handle_advantage_line(std::string_view line, std::size_t line_no) {
  return guarded(line, line_no, [&](const json& obj, const std::string&) -> std::string {
    check_keys(obj, {"prompt_id", "rewards", "protocol_version"});
    check_version(obj);
    auto pid = obj.find("prompt_id");
    if (pid == obj.end() || !pid->is_string()) bad("'prompt_id' must be a string");
    auto rw = obj.find("rewards");
    if (rw == obj.end() || !rw->is_array()) bad("'rewards' must be an array of numbers");
    std::vector<double> rewards;
    for (const auto& r : *rw) {
      if (!r.is_number()) bad("'rewards' must be an array of numbers");
      rewards.push_back(r.get<double>());
    }
    std::vector<double> adv;
    try {
      adv = advantages(rewards);
    } catch (const Error& e) {
      throw BadRequest{e.code(), "prompt " + pid->get<std::string>() + ": " + e.what()};
    }
    ojson out = {{"prompt_id", *pid}, {"advantages", adv}, {"protocol_version", kProtocolVersion}};
    return out.dump();
  });
}

std::string handle_line(const Engine& engine, std::string_view line, std::size_t line_no) {
  // Cheap routing; a line that does not parse falls through to the reward
  // handler, which reports it.
  try {
    const auto obj = json::parse(line);
    if (obj.is_object() && obj.contains("rewards")) return handle_advantage_line(line, line_no);
  } catch (const json::exception&) {
  }
  return handle_reward_line(engine, line, line_no);
}

std::string handle_batch(const Engine& engine, std::string_view body, BatchKind kind, int threads) {
  struct Item {
    std::string_view line;
    std::size_t line_no;
  };
  std::vector<Item> items;
  std::size_t start = 0, line_no = 0;
  while (start < body.size()) {
    auto end = body.find('\n', start);
    if (end == std::string_view::npos) end = body.size();
    auto line = body.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!text::trim(line).empty()) items.push_back({line, line_no});
  }
  std::vector<std::string> out(items.size());
  auto run = [&](std::size_t i) {
    const auto& it = items[i];
    switch (kind) {
      case BatchKind::Reward: out[i] = handle_reward_line(engine, it.line, it.line_no); break;
      case BatchKind::Advantage: out[i] = handle_advantage_line(it.line, it.line_no); break;
      case BatchKind::Any: out[i] = handle_line(engine, it.line, it.line_no); break;
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || items.size() < 2) {
    for (std::size_t i = 0; i < items.size(); ++i) run(i);
  } else {
    // Strided split; each slot is written by exactly one worker.
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < items.size(); i += workers) run(i);
      }));
    }
    for (auto& j : jobs) j.get();
  }
  std::string joined;
  for (const auto& s : out) joined.append(s).push_back('\n');
  return joined;
}

}  // namespace chemreward
