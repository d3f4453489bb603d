#include "chemreward/curation.hpp"

#include <fstream>
#include <limits>
#include <unordered_map>

#include "chemreward/reward.hpp"
#include "chemreward/text.hpp"
#include "chemreward/version.hpp"
#include "json.hpp"

namespace chemreward {

namespace {

using ojson = nlohmann::ordered_json;

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t start = 0, line = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line;
    const auto content = text.substr(start, end - start);
    start = end + 1;
    if (text::trim(content).empty()) continue;
    try {
      fn(ojson::parse(content), line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("jsonl_error", "line " + std::to_string(line) + ": " + e.what());
    }
  }
}

[[noreturn]] void bad_line(std::size_t line, const std::string& msg) {
  throw Error("jsonl_error", "line " + std::to_string(line) + ": " + msg);
}

std::string required_string(const ojson& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) bad_line(line, std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

}  // namespace

RejectionResult rejection_filter(std::vector<TeacherTrajectory> trajectories) {
  RejectionResult res;
  for (auto& t : trajectories) {
    if (t.prompt_id.empty() || t.teacher_id.empty()) {
      throw Error("invalid_record", "trajectory needs a prompt_id and a teacher_id");
    }
    const auto parsed = parse_response(t.response_text);
    if (!parsed.format_ok) {
      ++res.report.format;
    } else if (*parsed.answer != t.label) {
      ++res.report.wrong_answer;
    } else {
      res.accepted.push_back(std::move(t));
    }
  }
  res.report.accepted = res.accepted.size();
  return res;
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw Error("invalid_argument", "uniform_index needs n >= 1");
  // Largest multiple of n that fits; draws at or above it are rejected.
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n + 1) % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % n;
}

std::vector<SftRecord> select_one_per_instance(const std::vector<TeacherTrajectory>& accepted, std::uint64_t seed) {
  if (accepted.empty()) throw Error("invalid_argument", "no accepted trajectories to select from");
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<const TeacherTrajectory*>> by_prompt;
  for (const auto& t : accepted) {
    auto& bucket = by_prompt[t.prompt_id];
    if (bucket.empty()) order.push_back(t.prompt_id);
    bucket.push_back(&t);
  }
  std::mt19937_64 rng(seed);
  std::vector<SftRecord> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    const auto& bucket = by_prompt[id];
    const auto* pick = bucket[uniform_index(rng, bucket.size())];
    out.push_back({pick->prompt_text, pick->response_text, pick->prompt_id, pick->teacher_id});
  }
  return out;
}

std::string sft_jsonl(const std::vector<SftRecord>& records, const ExportMetadata& meta) {
  ojson counts = ojson::object();
  for (const auto& [k, v] : meta.counts) counts[k] = v;
  ojson head = {{"metadata", {{"seed", meta.seed}, {"counts", counts}, {"engine_version", kEngineVersion}}}};
  std::string out = head.dump() + "\n";
  for (const auto& r : records) {
    ojson line = {{"prompt", r.prompt_text},
                  {"response", r.response_text},
                  {"prompt_id", r.prompt_id},
                  {"teacher_id", r.teacher_id}};
    out += line.dump() + "\n";
  }
  return out;
}

std::size_t export_sft(const std::vector<SftRecord>& records, const ExportMetadata& meta, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io_error", "cannot write " + path);
  out << sft_jsonl(records, meta);
  if (!out.flush()) throw Error("io_error", "write failed for " + path);
  return records.size();
}

SftFile parse_sft_jsonl(std::string_view text) {
  SftFile file;
  bool have_meta = false;
  for_each_line(text, [&](const ojson& obj, std::size_t line) {
    if (!obj.is_object()) bad_line(line, "expected a JSON object");
    if (!have_meta) {
      auto it = obj.find("metadata");
      if (it == obj.end() || obj.size() != 1) bad_line(line, "first line must be the metadata object");
      file.meta.seed = it->at("seed").get<std::uint64_t>();
      for (const auto& [k, v] : it->at("counts").items()) file.meta.counts[k] = v.get<std::size_t>();
      file.engine_version = it->at("engine_version").get<std::string>();
      have_meta = true;
      return;
    }
    if (obj.size() != 4) bad_line(line, "record must have exactly prompt, response, prompt_id, teacher_id");
    file.records.push_back({required_string(obj, "prompt", line), required_string(obj, "response", line),
                            required_string(obj, "prompt_id", line), required_string(obj, "teacher_id", line)});
  });
  if (!have_meta) throw Error("jsonl_error", "line 1: missing metadata line");
  return file;
}

std::vector<TeacherTrajectory> parse_trajectories_jsonl(std::string_view text) {
  std::vector<TeacherTrajectory> out;
  for_each_line(text, [&](const ojson& obj, std::size_t line) {
    if (!obj.is_object()) bad_line(line, "expected a JSON object");
    TeacherTrajectory t;
    t.prompt_id = required_string(obj, "prompt_id", line);
    t.teacher_id = required_string(obj, "teacher_id", line);
    t.response_text = required_string(obj, "response", line);
    if (auto it = obj.find("prompt"); it != obj.end()) {
      if (!it->is_string()) bad_line(line, "'prompt' must be a string");
      t.prompt_text = it->get<std::string>();
    }
    auto lab = obj.find("label");
    if (lab == obj.end()) bad_line(line, "missing field 'label'");
    if (lab->is_boolean()) {
      t.label = lab->get<bool>();
    } else if (lab->is_string()) {
      auto v = text::parse_label(lab->get<std::string>());
      if (!v) bad_line(line, "label must be True or False");
      t.label = *v;
    } else {
      bad_line(line, "label must be a boolean or a string");
    }
    if (t.prompt_id.empty() || t.teacher_id.empty()) bad_line(line, "prompt_id and teacher_id must be non-empty");
    out.push_back(std::move(t));
  });
  return out;
}

std::string trajectories_jsonl(const std::vector<TeacherTrajectory>& trajectories) {
  std::string out;
  for (const auto& t : trajectories) {
    ojson line = {{"prompt_id", t.prompt_id},
                  {"teacher_id", t.teacher_id},
                  {"prompt", t.prompt_text},
                  {"response", t.response_text},
                  {"label", t.label}};
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace chemreward
