#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "chemreward/patterns.hpp"
#include "test_support.hpp"

using namespace chemreward;

namespace {

const SubstructurePattern& pattern(std::string_view name) {
  const auto* p = builtin_library().find(name);
  if (!p) throw std::runtime_error("missing pattern " + std::string(name));
  return *p;
}

std::set<std::string> feature_names(const std::string& smiles) {
  auto names = extract_features(parse_smiles(smiles), builtin_library()).names();
  return {names.begin(), names.end()};
}

// Independent re-check of one mapping, written without the matcher's helpers.
bool satisfies(const SubstructurePattern& p, const MoleculeGraph& g, const Mapping& m) {
  if (m.size() != p.nodes.size()) return false;
  std::set<int> distinct(m.begin(), m.end());
  if (distinct.size() != m.size()) return false;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& node = p.nodes[i];
    const Atom& a = g.atom(m[i]);
    if (!node.elements.empty() &&
        std::find(node.elements.begin(), node.elements.end(), a.element) == node.elements.end())
      return false;
    if (node.aromatic && *node.aromatic != a.aromatic) return false;
    if (node.charge && *node.charge != a.formal_charge) return false;
    const int degree = static_cast<int>(g.neighbors(m[i]).size());
    if (node.min_degree && degree < *node.min_degree) return false;
    if (node.max_degree && degree > *node.max_degree) return false;
    if (node.attached_h && g.total_h(m[i]) != *node.attached_h) return false;
  }
  for (const auto& e : p.edges) {
    int a = m[static_cast<std::size_t>(e.from)];
    int b = m[static_cast<std::size_t>(e.to)];
    const Bond* found = nullptr;
    for (const auto& bond : g.bonds()) {
      if ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a)) found = &bond;
    }
    if (!found) return false;
    switch (e.bond) {
      case BondConstraint::Single: if (found->order != BondOrder::Single) return false; break;
      case BondConstraint::Double: if (found->order != BondOrder::Double) return false; break;
      case BondConstraint::Triple: if (found->order != BondOrder::Triple) return false; break;
      case BondConstraint::Aromatic: if (found->order != BondOrder::Aromatic) return false; break;
      case BondConstraint::Any: break;
    }
  }
  return true;
}

// Every injective assignment, deduplicated by atom set.
std::set<std::vector<int>> brute_force(const SubstructurePattern& p, const MoleculeGraph& g) {
  std::set<std::vector<int>> out;
  const int n = static_cast<int>(g.atom_count());
  const std::size_t k = p.nodes.size();
  if (k > static_cast<std::size_t>(n)) return out;
  Mapping m(k, 0);
  while (true) {
    if (satisfies(p, g, m)) {
      auto key = m;
      std::sort(key.begin(), key.end());
      out.insert(key);
    }
    std::size_t pos = 0;
    while (pos < k && ++m[pos] == n) m[pos++] = 0;
    if (pos == k) break;
  }
  return out;
}

}  // namespace

TEST(Patterns, LibraryHasDocumentedGroups) {
  const auto& lib = builtin_library();
  EXPECT_GE(lib.patterns.size(), 20u);
  for (const char* name : {"hydroxyl", "carboxylic_acid", "ester", "ether", "amide", "primary_amine", "secondary_amine",
                           "tertiary_amine", "nitro", "nitrile", "halogen", "sulfonamide", "thiol", "thioether",
                           "ketone", "aldehyde", "guanidinium", "phenol", "urea", "carbamate"}) {
    EXPECT_NE(lib.find(name), nullptr) << name;
  }
  for (const auto& p : lib.patterns) EXPECT_FALSE(p.description.empty()) << p.name;
}

TEST(Patterns, EveryPatternMatchesItsExemplar) {
  for (const auto& p : builtin_library().patterns) {
    ASSERT_FALSE(p.exemplar.empty()) << p.name;
    EXPECT_FALSE(match(p, parse_smiles(p.exemplar)).empty()) << p.name << " on " << p.exemplar;
  }
}

TEST(Patterns, NothingMatchesMethane) {
  auto methane = parse_smiles("C");
  for (const auto& p : builtin_library().patterns) EXPECT_TRUE(match(p, methane).empty()) << p.name;
  EXPECT_TRUE(extract_features(methane, builtin_library()).empty());
}

TEST(Patterns, MappingCounts) {
  EXPECT_EQ(match(pattern("hydroxyl"), parse_smiles("CCO")).size(), 1u);
  EXPECT_EQ(match(pattern("carboxylic_acid"), parse_smiles("CC(=O)O")).size(), 1u);
  auto bace = parse_smiles("ClC1=CC(=CC(Cl)=C1NC(=O)C)CNC(=[NH2+1])NC(=O)CN2C3=C(C=CC=C3)C=C2");
  EXPECT_GE(match(pattern("amide"), bace).size(), 2u);
  // Symmetric matches of the tertiary amine collapse to one atom set.
  EXPECT_EQ(match(pattern("tertiary_amine"), parse_smiles("CN(C)C")).size(), 1u);
}

TEST(Patterns, PatternLargerThanGraphIsEmpty) {
  EXPECT_TRUE(match(pattern("ester"), parse_smiles("CO")).empty());
}

TEST(Patterns, ExtractFeatureExamples) {
  EXPECT_EQ(feature_names("c1ccccc1"), (std::set<std::string>{"aromatic_ring"}));
  EXPECT_EQ(feature_names("CC(=O)O"), (std::set<std::string>{"carboxylic_acid"}));
  EXPECT_EQ(feature_names("OCC(N)C(=O)O"), (std::set<std::string>{"hydroxyl", "primary_amine", "carboxylic_acid"}));
  EXPECT_EQ(feature_names("CC(=O)OC"), (std::set<std::string>{"ester"}));
  EXPECT_EQ(feature_names("CC(=O)C"), (std::set<std::string>{"ketone"}));
  EXPECT_EQ(feature_names("CC(=O)NC"), (std::set<std::string>{"amide"}));
  EXPECT_EQ(feature_names("Oc1ccccc1"), (std::set<std::string>{"phenol", "aromatic_ring"}));
  EXPECT_EQ(feature_names("C1CCCCC1"), (std::set<std::string>{"aliphatic_ring"}));
  EXPECT_EQ(feature_names("c1ccc2ccccc2c1"), (std::set<std::string>{"aromatic_ring", "fused_ring_system"}));
  EXPECT_EQ(feature_names("N[C@@H](C)C(=O)O"),
            (std::set<std::string>{"primary_amine", "carboxylic_acid", "stereocenter"}));
  EXPECT_EQ(feature_names("F/C=C/F"), (std::set<std::string>{"halogen", "double_bond_stereo"}));
}

TEST(Patterns, SuppressionIsLocal) {
  // The hydroxyl away from the acid survives; the acid's own O-H does not count.
  auto f = extract_features(parse_smiles("OCCC(=O)O"), builtin_library());
  EXPECT_EQ(f.count("hydroxyl"), 1);
  EXPECT_EQ(f.count("carboxylic_acid"), 1);
}

TEST(Patterns, BaceFeatures) {
  auto f = extract_features(parse_smiles("ClC1=CC(=CC(Cl)=C1NC(=O)C)CNC(=[NH2+1])NC(=O)CN2C3=C(C=CC=C3)C=C2"),
                            builtin_library());
  EXPECT_EQ(f.count("halogen"), 2);
  EXPECT_TRUE(f.contains("amide"));
  EXPECT_TRUE(f.contains("guanidinium"));
  EXPECT_FALSE(f.contains("imine"));
  EXPECT_FALSE(f.contains("secondary_amine"));
  for (const auto& [_, c] : f.counts()) EXPECT_GE(c, 1);
}

TEST(Patterns, CompletenessAgainstExhaustiveEnumeration) {
  int graphs = 0;
  for (const auto& smiles : testing_support::load_corpus()) {
    auto g = parse_smiles(smiles);
    if (g.atom_count() > 8) continue;
    ++graphs;
    for (const auto& p : builtin_library().patterns) {
      std::set<std::vector<int>> got;
      for (const auto& m : match(p, g)) {
        auto key = m;
        std::sort(key.begin(), key.end());
        EXPECT_TRUE(got.insert(key).second) << "duplicate atom set for " << p.name << " on " << smiles;
      }
      EXPECT_EQ(got, brute_force(p, g)) << p.name << " on " << smiles;
    }
  }
  EXPECT_GE(graphs, 20);
}

TEST(Patterns, SoundnessOnCorpus) {
  for (const auto& smiles : testing_support::load_corpus()) {
    auto g = parse_smiles(smiles);
    for (const auto& p : builtin_library().patterns) {
      for (const auto& m : match(p, g)) EXPECT_TRUE(satisfies(p, g, m)) << p.name << " on " << smiles;
    }
  }
}

TEST(Patterns, IndependentOfLibraryOrder) {
  FeatureLibrary shuffled = builtin_library();
  std::mt19937_64 rng(7);
  auto corpus = testing_support::load_corpus();
  for (int round = 0; round < 5; ++round) {
    std::shuffle(shuffled.patterns.begin(), shuffled.patterns.end(), rng);
    std::shuffle(shuffled.suppressions.begin(), shuffled.suppressions.end(), rng);
    for (const auto& smiles : corpus) {
      auto g = parse_smiles(smiles);
      EXPECT_EQ(extract_features(g, builtin_library()), extract_features(g, shuffled)) << smiles;
    }
  }
}

TEST(Patterns, InvariantUnderReindexing) {
  std::mt19937_64 rng(11);
  for (const auto& smiles : testing_support::load_corpus()) {
    auto g = parse_smiles(smiles);
    std::vector<int> order(g.atom_count());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    auto h = g.renumbered(order);
    auto fg = extract_features(g, builtin_library());
    auto fh = extract_features(h, builtin_library());
    EXPECT_EQ(fg, fh) << smiles;
  }
}

TEST(Patterns, LibraryParserErrors) {
  auto bad = [](const std::string& body) {
    try {
      parse_feature_library(body);
    } catch (const Error& e) {
      return std::string(e.code());
    }
    return std::string("ok");
  };
  EXPECT_EQ(bad("pattern | a | functional_group | el=C | | C"), "ok");
  EXPECT_EQ(bad("pattern | a | nonsense | el=C | | C"), "feature_library_error");
  EXPECT_EQ(bad("pattern | a | functional_group | el=C ; el=O | | CO"), "feature_library_error");  // disconnected
  EXPECT_EQ(bad("pattern | a | functional_group | el=C ; el=O | 0-5:- | CO"), "feature_library_error");
  EXPECT_EQ(bad("pattern | a | functional_group | ar=2 | | C"), "feature_library_error");
  EXPECT_EQ(bad("pattern | a | functional_group | el=Xx | | C"), "feature_library_error");
  EXPECT_EQ(bad("pattern | a | functional_group | el=C | | C\npattern | a | functional_group | el=O | | O"),
            "feature_library_error");
  EXPECT_EQ(bad("pattern | a | functional_group | el=C | | C\nsuppress | a | b"), "feature_library_error");
  EXPECT_EQ(bad("# only comments\n"), "feature_library_error");
}

TEST(Patterns, UniverseCoversEmittedNames) {
  auto universe = feature_universe(builtin_library());
  std::set<std::string> u(universe.begin(), universe.end());
  for (const auto& smiles : testing_support::load_corpus()) {
    for (const auto& name : extract_features(parse_smiles(smiles), builtin_library()).names()) {
      EXPECT_TRUE(u.count(name)) << name;
    }
  }
}
