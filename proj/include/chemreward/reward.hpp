#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemreward/descriptors.hpp"
#include "chemreward/patterns.hpp"
#include "chemreward/promptkit.hpp"

namespace chemreward {

struct RewardWeights {
  double lambda1 = 1.0;  // answer + format
  double lambda2 = 0.25; // consistency + comparison
  double lambda3 = 0.25; // principle + structure

  /// Throws Error("invalid_weights") unless all are finite and >= 0.
  void validate() const;
  bool operator==(const RewardWeights&) const = default;
};

struct ParsedResponse {
  std::string think;
  std::optional<bool> answer;
  bool format_ok = false;
};

enum class ClaimField { LogP, MolWeight, Hbd, Hba, AromaticRings, AliphaticRings, Stereocenters, HeavyAtoms };
enum class ClaimOp { Ge, Le, Gt, Lt, Eq };

/// One row of the claim table. A Lipinski row compares the polarity of the
/// sentence ("passes" vs "fails") with the rule-of-five verdict; every other
/// row checks `field op threshold`.
struct ClaimRule {
  std::vector<std::string> triggers;  // lowercase
  bool lipinski = false;
  ClaimField field = ClaimField::LogP;
  ClaimOp op = ClaimOp::Ge;
  double threshold = 0.0;

  bool holds(const DescriptorReport& report) const;
  bool operator==(const ClaimRule&) const = default;
};

/// Everything the text-derived components depend on. Immutable once loaded.
struct RewardConfig {
  RewardWeights weights;
  std::size_t conclusion_sentences = 3;
  std::size_t min_smiles_substring = 8;
  std::vector<std::string> affirmative;
  std::vector<std::string> negative;
  std::vector<std::string> negation;
  std::vector<std::string> example_phrases;
  std::vector<std::string> label_words;
  std::vector<ClaimRule> claims;
  std::map<std::string, std::vector<std::string>> synonyms;  // feature name -> phrases

  /// Parses the reward.conf format. Unknown keys, malformed predicates and
  /// synonym entries for names outside the feature universe raise
  /// Error("config_error", "<source>:<line>: ...").
  static RewardConfig parse(std::string_view text, std::string_view source = "reward.conf");
  static RewardConfig load(const std::string& path);
  /// data/reward.conf as compiled in.
  static const RewardConfig& builtin();

  /// Canonical text that parse() maps back to an equal config.
  std::string dump() const;

  bool operator==(const RewardConfig&) const = default;
};

struct RewardRequest {
  std::string molecule;  // SMILES
  bool label = false;
  std::string response_text;
  std::vector<FewShotExample> fewshot;
  std::optional<RewardWeights> weights;  // falls back to the config weights
};

struct RewardBreakdown {
  double r_ans = 0, r_fmt = 0, r_cons = 0, r_comp = 0, r_prin = 0, r_struct = 0;
  double r_total = 0;
  std::optional<bool> answer;
  bool format_ok = false;

  bool operator==(const RewardBreakdown&) const = default;
};

/// Small constant in the structure-coverage denominator.
inline constexpr double kStructureEpsilon = 1e-5;

ParsedResponse parse_response(std::string_view text);
double answer_reward(const ParsedResponse& parsed, bool label);
double format_reward(std::string_view text);
double consistency_reward(std::string_view think, std::optional<bool> answer,
                          const RewardConfig& config = RewardConfig::builtin());
double comparative_reward(std::string_view think, const std::vector<FewShotExample>& fewshot,
                          const RewardConfig& config = RewardConfig::builtin());
double principle_reward(std::string_view think, const DescriptorReport& report,
                        const RewardConfig& config = RewardConfig::builtin());
double structure_reward(std::string_view think, const FeatureSet& s_actual,
                        const RewardConfig& config = RewardConfig::builtin());

/// Feature names the reasoning mentions, limited to the library universe.
std::vector<std::string> mentioned_features(std::string_view think,
                                            const RewardConfig& config = RewardConfig::builtin());

/// l1*(ans+fmt) + l2*(cons+comp) + l3*(prin+struct), evaluated in exactly
/// this order so callers can reproduce it bit for bit.
inline double combine_reward(const RewardWeights& w, double r_ans, double r_fmt, double r_cons, double r_comp,
                             double r_prin, double r_struct) {
  return w.lambda1 * (r_ans + r_fmt) + w.lambda2 * (r_cons + r_comp) + w.lambda3 * (r_prin + r_struct);
}

/// Unparseable molecules propagate as SmilesError.
RewardBreakdown total_reward(const RewardRequest& request, const RewardConfig& config = RewardConfig::builtin());

}  // namespace chemreward
