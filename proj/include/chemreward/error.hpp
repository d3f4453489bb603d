#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace chemreward {

/// Base class for every error raised by the engine. `code()` is a stable
/// machine-readable identifier (snake_case) suitable for JSON error objects.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

enum class SmilesErrorKind {
  Syntax,
  UnmatchedParenthesis,
  UnmatchedRingClosure,
  UnknownElement,
  ValenceViolation,
  Unsupported,
};

const char* to_code(SmilesErrorKind kind) noexcept;

/// Raised by the SMILES reader. `offset()` is a byte offset into the input;
/// valence violations additionally carry the offending atom index.
class SmilesError : public Error {
 public:
  SmilesError(SmilesErrorKind kind, std::size_t offset, const std::string& detail,
              std::optional<int> atom = std::nullopt);

  SmilesErrorKind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }
  std::optional<int> atom() const noexcept { return atom_; }

 private:
  SmilesErrorKind kind_;
  std::size_t offset_;
  std::optional<int> atom_;
};

}  // namespace chemreward
