#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chemreward/error.hpp"

namespace chemreward {

struct ScoredPrediction {
  std::string id;
  double score = 0.0;
  bool label = false;
};

/// Mann-Whitney AUC with ties worth half, computed from integer pair counts
/// so the result is the exact rational (2*wins + ties) / (2*P*N) rounded once.
/// Throws Error("undefined_metric") unless both classes are present and
/// Error("invalid_argument") for non-finite scores.
double roc_auc(std::span<const ScoredPrediction> predictions);

/// Single-shot: True -> 1.0, False -> 0.0, absent -> 0.5.
double binary_score(std::optional<bool> answer) noexcept;
/// Fraction of samples answering True; absent samples count as not True.
/// No samples at all scores like an absent answer.
double sample_score(std::span<const std::optional<bool>> samples) noexcept;

/// Header row with id, label and either score or answer (True/False/blank).
/// Throws Error("csv_error", "line N: ...").
std::vector<ScoredPrediction> parse_predictions_csv(std::string_view text);

struct GroupSpec {
  std::string name;
  std::vector<std::string> members;
};

struct GroupAverage {
  std::string name;
  std::optional<double> mean;         // nullopt when no member is present
  std::vector<std::string> missing;   // members without a value
};

using MetricRow = std::map<std::string, std::optional<double>>;

/// Mean over present members. Values are summed in sorted order so the
/// result does not depend on dataset order.
std::vector<GroupAverage> aggregate(const MetricRow& values, std::span<const GroupSpec> groups);

/// A results table transcribed from a publication.
struct PublishedTable {
  struct Row {
    std::string name;
    MetricRow values;
  };
  /// (this row, column) is the same quantity as (other table, row, column).
  struct CrossRef {
    std::string row, column, other_table, other_row;
  };

  std::string id;
  std::string caption;
  int decimals = 4;
  double tolerance = 0.00051;
  std::vector<std::string> columns;  // value columns in file order
  std::vector<GroupSpec> groups;     // group name is also a column holding the published average
  std::vector<Row> rows;
  std::vector<CrossRef> crossrefs;
  std::vector<std::string> notes;

  const Row* find_row(std::string_view name) const;
};

/// Default rounding tolerance for a table printed with `decimals` places:
/// 0.00051 for four, 0.0006 for three.
double rounding_tolerance(int decimals) noexcept;

/// CSV with '#key=value' directives: table, caption, decimals, tolerance,
/// group=<column>:<member>,..., crossref=<row>,<column>,<table>,<row>, note.
/// Empty cells and "--" are missing values.
/// Throws Error("table_error", "<source>:<line>: ...").
PublishedTable parse_published_table(std::string_view text, std::string_view source = "table");
PublishedTable load_published_table(const std::string& path);
/// Every *.csv in `directory`, ordered by file name.
std::vector<PublishedTable> load_published_tables(const std::string& directory);

struct AuditFinding {
  enum class Kind { Average, CrossRef };
  Kind kind = Kind::Average;
  std::string table, row, column;
  double recomputed = 0.0;  // for a cross-reference: the other table's value
  double published = 0.0;
  double delta = 0.0;
  double tolerance = 0.0;
  bool mismatch = false;
  std::vector<std::string> missing;  // members left out of the mean
  std::string explanation;           // set when a cross-referenced value reconciles a mismatch
};

struct AuditReport {
  std::vector<AuditFinding> findings;
  std::vector<std::pair<std::string, std::string>> notes;  // (table, note)

  std::size_t mismatches() const;
  const AuditFinding* find(std::string_view table, std::string_view row, std::string_view column) const;
  std::string to_text() const;
};

/// Recomputes every published group average and compares cross-referenced
/// cells. Published numbers are only reported on, never changed.
/// Throws Error("table_error") when a cross-reference names an unknown
/// table, row or column.
AuditReport audit_tables(std::span<const PublishedTable> tables);

/// Reads the single integer score a judge returns ("7", "[7]", "Score: 7").
/// Throws Error("judge_output") unless exactly one integer in 0..10 is found.
int parse_judge_score(std::string_view output);

struct JudgeSummary {
  double logical_soundness = 0, accuracy_insight = 0, conciseness = 0;
  double average = 0;  // mean of the three dimension means
  std::size_t samples = 0;
};

/// Each entry holds one response's scores in dimension order (logical
/// soundness, accuracy & insight, conciseness). Throws Error("invalid_argument")
/// on an empty list or a score outside 0..10.
JudgeSummary aggregate_judge_scores(std::span<const std::array<int, 3>> scores);

}  // namespace chemreward
