#include "chemreward/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>

#include "chemreward/curation.hpp"
#include "chemreward/error.hpp"
#include "chemreward/hash.hpp"
#include "chemreward/molgraph.hpp"
#include "chemreward/text.hpp"

namespace chemreward {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name, const std::string& source) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (text::iequals(header[i], name)) return i;
  }
  throw Error("dataset_error", source + ": missing column '" + name + "'");
}

}  // namespace

DatasetTable ingest_dataset_text(std::string_view csv, const std::string& task, const IngestOptions& options,
                                 std::string source) {
  DatasetTable out;
  auto& prov = out.provenance;
  prov.source = source;
  std::string digest_input(csv);
  digest_input += '\0' + task + '\0' + options.smiles_column + '\0' + options.label_column;
  prov.content_hash = hex64(fnv1a64(digest_input));

  std::size_t pos = 0, line_no = 0;
  std::optional<std::size_t> smiles_col, label_col;
  std::size_t width = 0;
  while (pos <= csv.size()) {
    std::size_t end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) continue;
    auto fields = text::split_csv_line(line);
    if (!smiles_col) {
      smiles_col = find_column(fields, options.smiles_column, source);
      label_col = find_column(fields, options.label_column, source);
      width = std::max(*smiles_col, *label_col) + 1;
      continue;
    }
    ++prov.rows_read;
    auto skip = [&](const std::string& why) {
      ++prov.skipped;
      prov.skipped_reasons.push_back("line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() < width) {
      skip("too few fields");
      continue;
    }
    auto label = text::parse_label(fields[*label_col]);
    if (!label) {
      skip("bad label '" + fields[*label_col] + "'");
      continue;
    }
    try {
      (void)parse_smiles(fields[*smiles_col]);
    } catch (const SmilesError& e) {
      skip(e.what());
      continue;
    }
    out.rows.push_back({fields[*smiles_col], *label, task});
  }
  if (!smiles_col) throw Error("dataset_error", source + ": no header row");
  if (out.rows.empty()) throw Error("dataset_error", source + ": no usable rows");
  return out;
}

DatasetTable ingest_dataset(const std::string& path, const std::string& task, const IngestOptions& options) {
  return ingest_dataset_text(text::read_file(path), task, options, path);
}

DatasetTable sample_training_subset(std::span<const DatasetTable> tables, std::size_t n, std::uint64_t seed) {
  std::map<std::string, std::vector<const LabeledMolecule*>> by_task;
  std::string digest;
  for (const auto& t : tables) {
    for (const auto& row : t.rows) by_task[row.task].push_back(&row);
    digest += t.provenance.content_hash;
  }
  std::size_t total = 0;
  for (const auto& [_, rows] : by_task) total += rows.size();
  if (by_task.empty() || total < n) {
    throw Error("insufficient_rows", "requested " + std::to_string(n) + " rows but only " + std::to_string(total) +
                                         " are available");
  }

  // Equal split; remainder and shortfalls from small tasks move to the
  // next tasks with room, in name order.
  std::vector<std::pair<const std::string*, std::vector<const LabeledMolecule*>*>> tasks;
  for (auto& [name, rows] : by_task) tasks.emplace_back(&name, &rows);
  std::vector<std::size_t> quota(tasks.size(), 0);
  std::size_t left = n;
  while (left > 0) {
    std::size_t open = 0;
    for (std::size_t i = 0; i < tasks.size(); ++i) open += quota[i] < tasks[i].second->size();
    const std::size_t share = std::max<std::size_t>(1, left / open);
    for (std::size_t i = 0; i < tasks.size() && left > 0; ++i) {
      const std::size_t room = tasks[i].second->size() - quota[i];
      const std::size_t take = std::min({share, room, left});
      quota[i] += take;
      left -= take;
    }
  }

  DatasetTable out;
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& rows = *tasks[t].second;
    std::vector<std::size_t> idx(rows.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < quota[t]; ++i) {
      const auto j = i + uniform_index(rng, idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(quota[t]);
    std::sort(idx.begin(), idx.end());
    for (auto i : idx) out.rows.push_back(*rows[i]);
  }
  auto& prov = out.provenance;
  prov.source = "sample(n=" + std::to_string(n) + ",seed=" + std::to_string(seed) + ")";
  prov.rows_read = total;
  prov.content_hash = hex64(fnv1a64(digest + '\0' + std::to_string(n) + '\0' + std::to_string(seed)));
  return out;
}

std::string dataset_csv(const DatasetTable& table) {
  std::string out = "smiles,label,task\n";
  for (const auto& r : table.rows) {
    out += r.smiles;
    out += r.label ? ",True," : ",False,";
    out += r.task;
    out += '\n';
  }
  return out;
}

}  // namespace chemreward
