#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemreward/molgraph.hpp"

namespace chemreward {

enum class FeatureCategory { FunctionalGroup, RingSystem, Stereo };

const char* to_string(FeatureCategory c) noexcept;

/// Constraints on one pattern node; unset fields match anything.
struct AtomPattern {
  std::vector<std::string> elements;  // any of these symbols; empty = any element
  std::optional<bool> aromatic;
  std::optional<int> charge;
  std::optional<int> min_degree;
  std::optional<int> max_degree;
  std::optional<int> attached_h;  // total hydrogens (implicit + bracket)

  bool has_constraint() const noexcept {
    return !elements.empty() || aromatic || charge || min_degree || max_degree || attached_h;
  }
  bool accepts(const MoleculeGraph& graph, int atom) const;
};

enum class BondConstraint { Single, Double, Triple, Aromatic, Any };

bool accepts(BondConstraint constraint, BondOrder order) noexcept;

struct PatternEdge {
  int from = 0;
  int to = 0;
  BondConstraint bond = BondConstraint::Any;
};

struct SubstructurePattern {
  std::string name;
  FeatureCategory category = FeatureCategory::FunctionalGroup;
  std::vector<AtomPattern> nodes;
  std::vector<PatternEdge> edges;
  std::string exemplar;     // a molecule the pattern must match
  std::string description;
};

/// "winner suppresses losers": a loser match is dropped when every
/// heteroatom it covers lies inside a single winner match.
struct Suppression {
  std::string winner;
  std::vector<std::string> losers;
};

struct FeatureLibrary {
  std::vector<SubstructurePattern> patterns;
  std::vector<Suppression> suppressions;

  const SubstructurePattern* find(std::string_view name) const;
};

/// Names of the features derived from ring perception and stereo marks
/// rather than from library patterns.
inline constexpr std::string_view kAromaticRing = "aromatic_ring";
inline constexpr std::string_view kAliphaticRing = "aliphatic_ring";
inline constexpr std::string_view kFusedRingSystem = "fused_ring_system";
inline constexpr std::string_view kStereocenter = "stereocenter";
inline constexpr std::string_view kDoubleBondStereo = "double_bond_stereo";

/// Set of feature-type names with occurrence counts (every count >= 1).
class FeatureSet {
 public:
  void add(const std::string& name, int count = 1);
  bool contains(std::string_view name) const { return counts_.find(std::string(name)) != counts_.end(); }
  int count(std::string_view name) const;
  std::size_t size() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return counts_.empty(); }
  std::vector<std::string> names() const;
  const std::map<std::string, int>& counts() const noexcept { return counts_; }

  bool operator==(const FeatureSet&) const = default;

 private:
  std::map<std::string, int> counts_;
};

/// Atom index per pattern node.
using Mapping = std::vector<int>;

/// All injective node->atom mappings satisfying the pattern, one per
/// distinct matched atom set, ordered by that atom set.
std::vector<Mapping> match(const SubstructurePattern& pattern, const MoleculeGraph& graph);

/// Library matches that survive suppression, plus ring and stereo features.
FeatureSet extract_features(const MoleculeGraph& graph, const FeatureLibrary& library);

/// Parses the line-oriented library format (see data/features.lib).
FeatureLibrary parse_feature_library(std::string_view text);
FeatureLibrary load_feature_library(const std::string& path);

/// The shipped library (data/features.lib compiled in).
const FeatureLibrary& builtin_library();

/// Every feature name extract_features can emit for this library.
std::vector<std::string> feature_universe(const FeatureLibrary& library);

}  // namespace chemreward
