#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chemreward/retrieval.hpp"

namespace chemreward {

struct DatasetProvenance {
  std::string source;
  std::size_t rows_read = 0;
  std::size_t skipped = 0;
  std::vector<std::string> skipped_reasons;  // "line N: why"
  std::string content_hash;                  // hex digest of inputs and options

  bool operator==(const DatasetProvenance&) const = default;
};

struct DatasetTable {
  std::vector<LabeledMolecule> rows;
  DatasetProvenance provenance;

  bool operator==(const DatasetTable&) const = default;
};

struct IngestOptions {
  std::string smiles_column = "smiles";  // matched case-insensitively
  std::string label_column = "label";
};

/// Reads a CSV with a header row. Labels 1/0, yes/no, True/False are
/// accepted; rows with any other label or an unparseable SMILES are skipped
/// and counted. Throws Error("dataset_error") for missing columns or when
/// no row survives.
DatasetTable ingest_dataset_text(std::string_view csv, const std::string& task, const IngestOptions& options = {},
                                 std::string source = "<memory>");
DatasetTable ingest_dataset(const std::string& path, const std::string& task, const IngestOptions& options = {});

/// Seeded sample of `n` rows without replacement, split as evenly across
/// tasks as their sizes allow (leftover quota goes to tasks in name order).
/// Rows keep their input order within a task; tasks appear in name order.
/// Throws Error("insufficient_rows").
DatasetTable sample_training_subset(std::span<const DatasetTable> tables, std::size_t n, std::uint64_t seed);

/// smiles,label,task CSV with True/False labels.
std::string dataset_csv(const DatasetTable& table);

}  // namespace chemreward
