#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chemreward::text {

std::string_view trim(std::string_view s) noexcept;
std::string lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep, bool trim_parts = true);
bool starts_with_ci(std::string_view s, std::string_view prefix) noexcept;
bool iequals(std::string_view a, std::string_view b) noexcept;

/// One CSV record: comma-separated, double-quoted fields may hold commas
/// and "" escapes. Unquoted fields are trimmed.
std::vector<std::string> split_csv_line(std::string_view line);

/// "1"/"0", "yes"/"no", "true"/"false" in any case, surrounding whitespace
/// ignored; anything else is nullopt.
std::optional<bool> parse_label(std::string_view s);

/// Reads a whole file; throws chemreward::Error("io_error") on failure.
std::string read_file(const std::string& path);

/// Case-insensitive phrase search honoring word boundaries: "polar" does
/// not match inside "nonpolar". `haystack_lower` must already be lowercase.
/// Returns the byte offset of the first hit or npos.
std::size_t find_phrase(std::string_view haystack_lower, std::string_view phrase_lower,
                        std::size_t from = 0) noexcept;

inline bool contains_phrase(std::string_view haystack_lower, std::string_view phrase_lower) noexcept {
  return find_phrase(haystack_lower, phrase_lower) != std::string_view::npos;
}

/// Splits prose into sentences on '.', '!', '?' followed by whitespace or
/// end of text, and on blank lines. Empty sentences are dropped.
std::vector<std::string> sentences(std::string_view prose);

}  // namespace chemreward::text
