#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chemreward/descriptors.hpp"
#include "chemreward/molgraph.hpp"

namespace chemreward {

inline constexpr int kDefaultTopK = 5;

/// One labeled input row for a store build.
struct LabeledMolecule {
  std::string smiles;
  bool label = false;
  std::string task;

  bool operator==(const LabeledMolecule&) const = default;
};

struct ExampleRecord {
  std::uint64_t ordinal = 0;  // insertion index among accepted rows
  std::string smiles;
  bool label = false;
  std::string task;
  Fingerprint fingerprint;

  bool operator==(const ExampleRecord&) const = default;
};

struct StoreBuildReport {
  std::size_t accepted = 0;
  std::size_t skipped = 0;  // rows whose SMILES did not parse
  std::vector<std::string> skipped_reasons;
};

struct RetrievalHit {
  std::size_t record = 0;  // index into ExampleStore::records()
  double similarity = 0.0;
};

/// Immutable fingerprint store. Queries are exhaustive scans.
class ExampleStore {
 public:
  /// Throws Error("empty_dataset") when no row parses.
  static ExampleStore build(std::span<const LabeledMolecule> rows, int radius = kDefaultFingerprintRadius,
                            int width = kDefaultFingerprintWidth, StoreBuildReport* report = nullptr);

  /// Binary form: magic, format version, radius, width, hash version,
  /// records, trailing FNV-1a checksum; integers little-endian.
  std::string serialize() const;
  /// Throws Error("store_format") on corrupt input and
  /// Error("store_incompatible") when the hash version differs.
  static ExampleStore deserialize(std::string_view bytes);
  void save(const std::string& path) const;
  static ExampleStore load(const std::string& path);

  const std::vector<ExampleRecord>& records() const noexcept { return records_; }
  int radius() const noexcept { return radius_; }
  int width() const noexcept { return width_; }
  const std::string& hash_version() const noexcept { return hash_version_; }
  bool has_task(std::string_view task) const { return task_index_.count(std::string(task)) != 0; }
  std::vector<std::string> tasks() const;

  /// Records of `task` ranked by descending Tanimoto, ties by ascending
  /// ordinal. Records isomorphic to the query are skipped. Returns at most k
  /// hits. Throws Error("unknown_task") or Error("invalid_argument") (k < 1).
  std::vector<RetrievalHit> top_k(const MoleculeGraph& query, int k, std::string_view task) const;

 private:
  void index();

  int radius_ = kDefaultFingerprintRadius;
  int width_ = kDefaultFingerprintWidth;
  std::string hash_version_;
  std::vector<ExampleRecord> records_;
  std::map<std::string, std::vector<std::size_t>> task_index_;
};

}  // namespace chemreward
