#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemreward/molgraph.hpp"

namespace chemreward {

struct FewShotExample {
  std::string smiles;
  bool label = false;

  bool operator==(const FewShotExample&) const = default;
};

inline constexpr std::string_view kDefaultRoleText =
    "You are a top AI assistant specializing in molecular chemistry and drug discovery, proficient in molecular "
    "property prediction.";
inline constexpr std::string_view kDefaultFormattingText =
    "Place the thought process within <think></think> and then conclude your answer with "
    "<answer>True/False</answer>.";
inline constexpr std::string_view kDefaultExampleText = "<think>xxxx</think>\n<answer>True/False</answer>";

struct PromptSpec {
  std::string role_text{kDefaultRoleText};
  std::string task_text;
  std::string formatting_text{kDefaultFormattingText};
  std::string example_text{kDefaultExampleText};
  std::vector<FewShotExample> fewshot;
  std::string molecule_smiles;
  std::optional<std::string> image_path;

  bool operator==(const PromptSpec&) const = default;
};

/// Sections in order: [Role] [Task] [Formatting] [Example] [Few-shot]
/// [Molecule]. Few-shot rows are "SMILES → True|False" lines and the whole
/// section is left out when there are none. The image, when set, is
/// referenced as "<image: path>" on the line after the SMILES.
/// Throws Error("invalid_prompt") when the formatting text lacks the
/// <think> or <answer> tag.
std::string build_prompt(const PromptSpec& spec);

/// Inverse of build_prompt. Throws Error("prompt_format") on text that is
/// not a prompt built by this module.
PromptSpec split_prompt(std::string_view prompt);

/// Per-dataset task descriptions (data/tasks/<id>.txt).
class TaskCatalog {
 public:
  /// The shipped catalog.
  static const TaskCatalog& builtin();
  /// Reads every *.txt file in `directory`; the file stem is the task id.
  static TaskCatalog load(const std::string& directory);

  /// Throws Error("unknown_task").
  const std::string& text(std::string_view task) const;
  bool contains(std::string_view task) const;
  std::vector<std::string> tasks() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

enum class JudgeDimension { LogicalSoundness, AccuracyInsight, Conciseness };

const char* to_string(JudgeDimension d) noexcept;
/// Accepts "logical_soundness", "accuracy_insight", "conciseness".
/// Throws Error("invalid_argument").
JudgeDimension parse_judge_dimension(std::string_view name);

struct JudgePromptSpec {
  JudgeDimension dimension = JudgeDimension::LogicalSoundness;
  std::string question;
  std::string response;
};

/// Rubric for the dimension with question and response pasted in verbatim.
std::string build_judge_prompt(const JudgePromptSpec& spec);

/// Distance between bonded atoms in the SVG, in user units.
inline constexpr double kDepictBondLength = 40.0;

/// Deterministic 2D depiction. Every atom is one element with class "atom"
/// and data-x/data-y attributes: carbons are unlabeled circles unless
/// isolated (then "CH4"-style text), other atoms are text labels with their
/// hydrogens and charge. Every bond is one <g class="bond"> holding one line
/// per drawn stroke. Rings are regular polygons, chains zigzag at 120°.
std::string depict_svg(const MoleculeGraph& graph);

}  // namespace chemreward
