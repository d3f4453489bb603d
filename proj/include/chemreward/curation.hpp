#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "chemreward/error.hpp"

namespace chemreward {

struct TeacherTrajectory {
  std::string prompt_id;
  std::string teacher_id;
  std::string prompt_text;
  std::string response_text;
  bool label = false;

  bool operator==(const TeacherTrajectory&) const = default;
};

struct SftRecord {
  std::string prompt_text;
  std::string response_text;
  std::string prompt_id;
  std::string teacher_id;

  bool operator==(const SftRecord&) const = default;
};

struct RejectionReport {
  std::size_t accepted = 0;
  std::size_t format = 0;        // no well-formed think/answer pair
  std::size_t wrong_answer = 0;

  bool operator==(const RejectionReport&) const = default;
};

struct RejectionResult {
  std::vector<TeacherTrajectory> accepted;
  RejectionReport report;
};

/// Keeps well-formed trajectories whose answer matches the label. A broken
/// format is reported as "format" even when the answer would be right.
/// Throws Error("invalid_record") on an empty prompt_id or teacher_id.
RejectionResult rejection_filter(std::vector<TeacherTrajectory> trajectories);

/// Uniform integer in [0, n) by rejection sampling on raw 64-bit draws, so
/// the sequence is the same with every standard library.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

/// One trajectory per prompt_id, chosen uniformly with a generator seeded by
/// `seed`. Output follows the first appearance of each prompt_id.
/// Throws Error("invalid_argument") on empty input.
std::vector<SftRecord> select_one_per_instance(const std::vector<TeacherTrajectory>& accepted, std::uint64_t seed);

struct ExportMetadata {
  std::uint64_t seed = 0;
  std::map<std::string, std::size_t> counts;

  bool operator==(const ExportMetadata&) const = default;
};

/// JSON Lines: a {"metadata": {seed, counts, engine_version}} line, then one
/// {"prompt", "response", "prompt_id", "teacher_id"} object per record.
std::string sft_jsonl(const std::vector<SftRecord>& records, const ExportMetadata& meta);

/// Writes sft_jsonl to `path` and returns the number of records written.
/// Throws Error("io_error").
std::size_t export_sft(const std::vector<SftRecord>& records, const ExportMetadata& meta, const std::string& path);

struct SftFile {
  ExportMetadata meta;
  std::string engine_version;
  std::vector<SftRecord> records;
};

/// Inverse of sft_jsonl. Throws Error("jsonl_error", "line N: ...").
SftFile parse_sft_jsonl(std::string_view text);

/// One trajectory object per line: prompt_id, teacher_id, response, label
/// (bool or "True"/"False"), optional prompt. Blank lines are skipped.
/// Throws Error("jsonl_error", "line N: ...").
std::vector<TeacherTrajectory> parse_trajectories_jsonl(std::string_view text);
std::string trajectories_jsonl(const std::vector<TeacherTrajectory>& trajectories);

}  // namespace chemreward
