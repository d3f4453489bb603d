#include "chemreward/text.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "chemreward/error.hpp"

namespace chemreward::text {

namespace {
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
}  // namespace

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split(std::string_view s, char sep, bool trim_parts) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    std::string_view part = s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    parts.emplace_back(trim_parts ? trim(part) : part);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) noexcept {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

bool iequals(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t find_phrase(std::string_view haystack, std::string_view phrase, std::size_t from) noexcept {
  if (phrase.empty()) return std::string_view::npos;
  while (true) {
    std::size_t pos = haystack.find(phrase, from);
    if (pos == std::string_view::npos) return pos;
    const bool left_ok = pos == 0 || !is_word(haystack[pos - 1]) || !is_word(phrase.front());
    const std::size_t end = pos + phrase.size();
    const bool right_ok = end >= haystack.size() || !is_word(haystack[end]) || !is_word(phrase.back());
    if (left_ok && right_ok) return pos;
    from = pos + 1;
  }
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"' && trim(cur).empty()) {
      cur.clear();
      quoted = was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else if (!was_quoted) {
      cur += c;
    }
  }
  out.push_back(was_quoted ? cur : std::string(trim(cur)));
  return out;
}

std::optional<bool> parse_label(std::string_view s) {
  s = trim(s);
  if (s == "1" || iequals(s, "yes") || iequals(s, "true")) return true;
  if (s == "0" || iequals(s, "no") || iequals(s, "false")) return false;
  return std::nullopt;
}

std::vector<std::string> sentences(std::string_view prose) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    auto t = trim(current);
    if (!t.empty()) out.emplace_back(t);
    current.clear();
  };
  for (std::size_t i = 0; i < prose.size(); ++i) {
    const char c = prose[i];
    if (c == '\n' && i + 1 < prose.size() && prose[i + 1] == '\n') {
      flush();
      continue;
    }
    current += c;
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == prose.size() || is_space(prose[i + 1]))) flush();
  }
  flush();
  return out;
}

}  // namespace chemreward::text
