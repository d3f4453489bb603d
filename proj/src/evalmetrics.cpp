#include "chemreward/evalmetrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>

#include "chemreward/text.hpp"

namespace chemreward {

namespace {

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = text::trim(s);
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string fmt(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

double sorted_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

// --- AUC -------------------------------------------------------------------

double roc_auc(std::span<const ScoredPrediction> predictions) {
  std::vector<std::pair<double, bool>> v;
  v.reserve(predictions.size());
  std::uint64_t pos = 0, neg = 0;
  for (const auto& p : predictions) {
    if (!std::isfinite(p.score)) throw Error("invalid_argument", "score for '" + p.id + "' is not finite");
    v.emplace_back(p.score, p.label);
    (p.label ? pos : neg)++;
  }
  if (pos == 0 || neg == 0) throw Error("undefined_metric", "AUC needs at least one positive and one negative");
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  // twice_u = 2 * (pairs where the positive scores higher) + tied pairs
  std::uint64_t twice_u = 0, neg_below = 0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    std::uint64_t p = 0, n = 0;
    for (; j < v.size() && v[j].first == v[i].first; ++j) (v[j].second ? p : n)++;
    twice_u += 2 * p * neg_below + p * n;
    neg_below += n;
    i = j;
  }
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double binary_score(std::optional<bool> answer) noexcept {
  if (!answer) return 0.5;
  return *answer ? 1.0 : 0.0;
}

double sample_score(std::span<const std::optional<bool>> samples) noexcept {
  if (samples.empty()) return 0.5;
  const auto yes = std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.value_or(false); });
  return static_cast<double>(yes) / static_cast<double>(samples.size());
}

std::vector<ScoredPrediction> parse_predictions_csv(std::string_view text_in) {
  const auto lines = lines_of(text_in);
  auto fail = [](std::size_t line, const std::string& msg) -> Error {
    return Error("csv_error", "line " + std::to_string(line) + ": " + msg);
  };
  std::size_t first = 0;
  while (first < lines.size() && text::trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw fail(1, "missing header row");
  const auto header = text::split(lines[first], ',');
  auto col = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (text::iequals(header[i], name)) return i;
    }
    return std::nullopt;
  };
  const auto id_col = col("id"), label_col = col("label"), score_col = col("score"), answer_col = col("answer");
  if (!id_col || !label_col) throw fail(first + 1, "header needs id and label columns");
  if (!score_col && !answer_col) throw fail(first + 1, "header needs a score or an answer column");

  std::vector<ScoredPrediction> out;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    const auto cells = text::split(lines[i], ',');
    if (cells.size() != header.size()) throw fail(i + 1, "expected " + std::to_string(header.size()) + " cells");
    ScoredPrediction p;
    p.id = cells[*id_col];
    auto label = text::parse_label(cells[*label_col]);
    if (!label) throw fail(i + 1, "label must be True/False or 1/0");
    p.label = *label;
    if (score_col) {
      auto s = to_double(cells[*score_col]);
      if (!s) throw fail(i + 1, "score is not a number");
      p.score = *s;
    } else {
      const auto& a = cells[*answer_col];
      std::optional<bool> ans;
      if (!a.empty()) {
        ans = text::parse_label(a);
        if (!ans) throw fail(i + 1, "answer must be True, False or empty");
      }
      p.score = binary_score(ans);
    }
    out.push_back(std::move(p));
  }
  return out;
}

// --- aggregation -----------------------------------------------------------

std::vector<GroupAverage> aggregate(const MetricRow& values, std::span<const GroupSpec> groups) {
  std::vector<GroupAverage> out;
  for (const auto& g : groups) {
    GroupAverage avg;
    avg.name = g.name;
    std::vector<double> present;
    for (const auto& m : g.members) {
      auto it = values.find(m);
      if (it == values.end() || !it->second) {
        avg.missing.push_back(m);
      } else {
        present.push_back(*it->second);
      }
    }
    if (!present.empty()) avg.mean = sorted_mean(std::move(present));
    out.push_back(std::move(avg));
  }
  return out;
}

// --- published tables ------------------------------------------------------

double rounding_tolerance(int decimals) noexcept {
  if (decimals == 4) return 0.00051;
  if (decimals == 3) return 0.0006;
  return 0.51 * std::pow(10.0, -decimals);
}

const PublishedTable::Row* PublishedTable::find_row(std::string_view name) const {
  for (const auto& r : rows) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

PublishedTable parse_published_table(std::string_view text_in, std::string_view source) {
  PublishedTable t;
  std::optional<double> tolerance;
  std::vector<std::string> header;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> Error {
    return Error("table_error", std::string(source) + ":" + std::to_string(line_no) + ": " + msg);
  };

  for (auto line : lines_of(text_in)) {
    ++line_no;
    line = text::trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) continue;  // plain comment
      const std::string key(text::trim(line.substr(1, eq - 1)));
      const std::string value(text::trim(line.substr(eq + 1)));
      if (key == "table") {
        t.id = value;
      } else if (key == "caption") {
        t.caption = value;
      } else if (key == "decimals") {
        auto d = to_double(value);
        if (!d || *d < 0 || *d > 10 || *d != std::floor(*d)) throw fail("decimals must be an integer 0..10");
        t.decimals = static_cast<int>(*d);
      } else if (key == "tolerance") {
        tolerance = to_double(value);
        if (!tolerance || *tolerance < 0) throw fail("tolerance must be a non-negative number");
      } else if (key == "group") {
        const auto colon = value.find(':');
        if (colon == std::string::npos) throw fail("group needs '<column>:<member>,...'");
        GroupSpec g{std::string(text::trim(std::string_view(value).substr(0, colon))),
                    text::split(std::string_view(value).substr(colon + 1), ',')};
        if (g.name.empty() || g.members.empty()) throw fail("empty group");
        t.groups.push_back(std::move(g));
      } else if (key == "crossref") {
        auto parts = text::split(value, ',');
        if (parts.size() != 4) throw fail("crossref needs '<row>,<column>,<table>,<row>'");
        t.crossrefs.push_back({parts[0], parts[1], parts[2], parts[3]});
      } else if (key == "note") {
        t.notes.push_back(value);
      } else {
        throw fail("unknown directive '" + key + "'");
      }
      continue;
    }
    auto cells = text::split(line, ',');
    if (header.empty()) {
      header = std::move(cells);
      if (header.size() < 2) throw fail("header needs a name column and at least one value column");
      t.columns.assign(header.begin() + 1, header.end());
      continue;
    }
    if (cells.size() != header.size()) throw fail("expected " + std::to_string(header.size()) + " cells");
    PublishedTable::Row row;
    row.name = cells[0];
    if (t.find_row(row.name)) throw fail("duplicate row '" + row.name + "'");
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (cells[i].empty() || cells[i] == "--") {
        row.values[header[i]] = std::nullopt;
        continue;
      }
      auto v = to_double(cells[i]);
      if (!v) throw fail("'" + cells[i] + "' is not a number");
      row.values[header[i]] = *v;
    }
    t.rows.push_back(std::move(row));
  }
  line_no = 0;
  if (t.id.empty()) throw fail("missing #table directive");
  if (header.empty()) throw fail("missing header row");
  auto has_col = [&](const std::string& c) { return std::find(t.columns.begin(), t.columns.end(), c) != t.columns.end(); };
  for (const auto& g : t.groups) {
    if (!has_col(g.name)) throw fail("group column '" + g.name + "' not in header");
    for (const auto& m : g.members) {
      if (!has_col(m)) throw fail("group member '" + m + "' not in header");
    }
  }
  t.tolerance = tolerance.value_or(rounding_tolerance(t.decimals));
  return t;
}

PublishedTable load_published_table(const std::string& path) {
  return parse_published_table(text::read_file(path), path);
}

std::vector<PublishedTable> load_published_tables(const std::string& directory) {
  std::vector<std::string> paths;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(directory, ec)) {
    if (entry.path().extension() == ".csv") paths.push_back(entry.path().string());
  }
  if (ec) throw Error("io_error", "cannot list " + directory + ": " + ec.message());
  std::sort(paths.begin(), paths.end());
  std::vector<PublishedTable> out;
  for (const auto& p : paths) out.push_back(load_published_table(p));
  return out;
}

// --- audit -----------------------------------------------------------------

std::size_t AuditReport::mismatches() const {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [](const AuditFinding& f) { return f.mismatch; }));
}

const AuditFinding* AuditReport::find(std::string_view table, std::string_view row, std::string_view column) const {
  for (const auto& f : findings) {
    if (f.table == table && f.row == row && f.column == column) return &f;
  }
  return nullptr;
}

std::string AuditReport::to_text() const {
  std::string out;
  for (const auto& f : findings) {
    out += f.mismatch ? "MISMATCH " : "ok       ";
    out += f.table + " | " + f.row + " | " + f.column;
    if (f.kind == AuditFinding::Kind::Average) {
      out += " | recomputed " + fmt(f.recomputed, 6) + " published " + fmt(f.published, 4);
    } else {
      out += " | same cell elsewhere " + fmt(f.recomputed, 4) + " here " + fmt(f.published, 4);
    }
    out += " | delta " + fmt(f.delta, 6) + " tol " + fmt(f.tolerance, 5);
    if (!f.missing.empty()) {
      out += " | excluded:";
      for (const auto& m : f.missing) out += " " + m;
    }
    if (!f.explanation.empty()) out += " | " + f.explanation;
    out += "\n";
  }
  for (const auto& [table, note] : notes) out += "note " + table + ": " + note + "\n";
  out += std::to_string(findings.size()) + " checks, " + std::to_string(mismatches()) + " mismatches\n";
  return out;
}

AuditReport audit_tables(std::span<const PublishedTable> tables) {
  auto table_by_id = [&](std::string_view id) -> const PublishedTable* {
    for (const auto& t : tables) {
      if (t.id == id) return &t;
    }
    return nullptr;
  };
  struct Link {
    std::string table, row, column;
    double value;
  };
  // Resolved cross-references, indexed from both ends.
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<Link>> links;
  AuditReport report;

  for (const auto& t : tables) {
    for (const auto& x : t.crossrefs) {
      const auto* here = t.find_row(x.row);
      const auto* other_t = table_by_id(x.other_table);
      const auto* there = other_t ? other_t->find_row(x.other_row) : nullptr;
      if (!here || !there) {
        throw Error("table_error", t.id + ": crossref " + x.row + "/" + x.column + " -> " + x.other_table + "/" +
                                       x.other_row + " does not resolve");
      }
      auto a = here->values.find(x.column);
      auto b = there->values.find(x.column);
      if (a == here->values.end() || b == there->values.end() || !a->second || !b->second) {
        throw Error("table_error", t.id + ": crossref column " + x.column + " has no value on both sides");
      }
      AuditFinding f;
      f.kind = AuditFinding::Kind::CrossRef;
      f.table = t.id;
      f.row = x.row;
      f.column = x.column;
      f.recomputed = *b->second;
      f.published = *a->second;
      f.delta = std::abs(f.published - f.recomputed);
      f.mismatch = f.recomputed != f.published;
      f.explanation = "cross-check against " + x.other_table + " | " + x.other_row;
      report.findings.push_back(f);
      links[{t.id, x.row, x.column}].push_back({x.other_table, x.other_row, x.column, *b->second});
      links[{x.other_table, x.other_row, x.column}].push_back({t.id, x.row, x.column, *a->second});
    }
  }

  for (const auto& t : tables) {
    for (const auto& row : t.rows) {
      const auto averages = aggregate(row.values, t.groups);
      for (std::size_t gi = 0; gi < t.groups.size(); ++gi) {
        const auto& g = t.groups[gi];
        const auto pub = row.values.find(g.name);
        if (pub == row.values.end() || !pub->second || !averages[gi].mean) continue;
        AuditFinding f;
        f.table = t.id;
        f.row = row.name;
        f.column = g.name;
        f.recomputed = *averages[gi].mean;
        f.published = *pub->second;
        f.delta = std::abs(f.recomputed - f.published);
        f.tolerance = t.tolerance;
        f.mismatch = f.delta > t.tolerance;
        f.missing = averages[gi].missing;
        if (f.mismatch) {
          // Does the same cell as published elsewhere reconcile the average?
          for (const auto& m : g.members) {
            auto it = links.find({t.id, row.name, m});
            if (it == links.end()) continue;
            for (const auto& link : it->second) {
              auto alt = row.values;
              alt[m] = link.value;
              const auto mean = *aggregate(alt, std::span(&g, 1))[0].mean;
              if (std::abs(mean - f.published) <= t.tolerance) {
                f.explanation = "consistent with " + m + " = " + fmt(link.value, t.decimals) + " from " + link.table +
                                " | " + link.row + " (mean " + fmt(mean, 6) + ")";
              }
            }
          }
        }
        report.findings.push_back(std::move(f));
      }
    }
    for (const auto& n : t.notes) report.notes.emplace_back(t.id, n);
  }
  return report;
}

// --- judge scores ----------------------------------------------------------

int parse_judge_score(std::string_view output) {
  std::vector<int> found;
  for (std::size_t i = 0; i < output.size();) {
    if (output[i] < '0' || output[i] > '9') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < output.size() && output[j] >= '0' && output[j] <= '9') ++j;
    // A decimal like 7.5 is not an integer score.
    if (j < output.size() && output[j] == '.' && j + 1 < output.size() && output[j + 1] >= '0' &&
        output[j + 1] <= '9') {
      throw Error("judge_output", "judge returned a non-integer score");
    }
    int v = 0;
    std::from_chars(output.data() + i, output.data() + j, v);
    found.push_back(j - i > 2 ? 99 : v);
    i = j;
  }
  if (found.size() != 1) throw Error("judge_output", "expected exactly one integer score in the judge output");
  if (found[0] < 0 || found[0] > 10) throw Error("judge_output", "judge score outside 0..10");
  return found[0];
}

JudgeSummary aggregate_judge_scores(std::span<const std::array<int, 3>> scores) {
  if (scores.empty()) throw Error("invalid_argument", "no judge scores to aggregate");
  std::array<std::int64_t, 3> sums{0, 0, 0};
  for (const auto& s : scores) {
    for (int d = 0; d < 3; ++d) {
      if (s[d] < 0 || s[d] > 10) throw Error("invalid_argument", "judge score outside 0..10");
      sums[d] += s[d];
    }
  }
  const double n = static_cast<double>(scores.size());
  JudgeSummary out;
  out.samples = scores.size();
  out.logical_soundness = static_cast<double>(sums[0]) / n;
  out.accuracy_insight = static_cast<double>(sums[1]) / n;
  out.conciseness = static_cast<double>(sums[2]) / n;
  out.average = (out.logical_soundness + out.accuracy_insight + out.conciseness) / 3.0;
  return out;
}

}  // namespace chemreward
