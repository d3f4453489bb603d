#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chemreward/error.hpp"

namespace chemreward {

enum class Chirality : std::uint8_t {
  None,
  CounterClockwise,  // '@'
  Clockwise,         // '@@'
};

enum class BondOrder : std::uint8_t { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

enum class BondStereo : std::uint8_t { None, Cis, Trans };

/// Directional single-bond mark ('/' = Up, '\' = Down) read from `Bond::a`
/// toward `Bond::b`.
enum class BondDirection : std::uint8_t { None, Up, Down };

struct Atom {
  int index = 0;
  int atomic_number = 0;
  std::string element;  // capitalized symbol, e.g. "Cl"
  bool aromatic = false;
  int formal_charge = 0;
  std::optional<int> isotope;
  int explicit_h = 0;    // hydrogen count written inside brackets
  bool bracket = false;  // written as a bracket atom
  Chirality chirality = Chirality::None;
  int fragment = 0;         // connected-component label, in order of first atom
  std::size_t offset = 0;   // byte offset of the atom in the source text

  bool operator==(const Atom&) const = default;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::Single;
  BondStereo stereo = BondStereo::None;          // double bonds only
  BondDirection direction = BondDirection::None;  // single bonds only

  int other(int atom) const noexcept { return atom == a ? b : a; }
  bool operator==(const Bond&) const = default;
};

/// Neighbor reference used by the chirality bookkeeping; -1 stands for the
/// bracket hydrogen.
inline constexpr int kImplicitHydrogenRef = -1;

/// Parsed molecule. Immutable once constructed: rings, implicit hydrogens
/// and fragment labels are derived in the constructor.
class MoleculeGraph {
 public:
  struct Neighbor {
    int atom;
    int bond;
  };

  MoleculeGraph() = default;

  /// `chiral_orders[i]` lists atom i's neighbors in the order they appear
  /// in the source text (used to keep '@'/'@@' meaningful when the atom
  /// order changes). May be empty when no atom is chiral.
  MoleculeGraph(std::vector<Atom> atoms, std::vector<Bond> bonds,
                std::vector<std::vector<int>> chiral_orders = {});

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<Bond>& bonds() const noexcept { return bonds_; }
  const std::vector<std::vector<int>>& rings() const noexcept { return rings_; }
  std::size_t atom_count() const noexcept { return atoms_.size(); }
  std::size_t bond_count() const noexcept { return bonds_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  const Atom& atom(int i) const { return atoms_.at(static_cast<std::size_t>(i)); }
  const Bond& bond(int i) const { return bonds_.at(static_cast<std::size_t>(i)); }
  std::span<const Neighbor> neighbors(int i) const { return adjacency_.at(static_cast<std::size_t>(i)); }
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }

  int implicit_h(int i) const { return implicit_h_.at(static_cast<std::size_t>(i)); }
  int total_h(int i) const { return implicit_h(i) + atom(i).explicit_h; }

  /// Bond index between two atoms, or -1.
  int bond_between(int i, int j) const;

  bool atom_in_ring(int i) const { return atom_in_ring_.at(static_cast<std::size_t>(i)) != 0; }
  bool bond_in_ring(int b) const { return bond_in_ring_.at(static_cast<std::size_t>(b)) != 0; }
  int fragment_count() const noexcept { return fragment_count_; }

  const std::vector<int>& chiral_order(int i) const { return chiral_orders_.at(static_cast<std::size_t>(i)); }

  /// Copy with atoms renumbered: atom i becomes atom `new_index[i]`.
  MoleculeGraph renumbered(std::span<const int> new_index) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<std::vector<int>> rings_;
  std::vector<int> implicit_h_;
  std::vector<std::uint8_t> atom_in_ring_;
  std::vector<std::uint8_t> bond_in_ring_;
  std::vector<std::vector<int>> chiral_orders_;
  int fragment_count_ = 0;
};

/// Reads a Daylight-style SMILES string. Throws SmilesError.
MoleculeGraph parse_smiles(std::string_view text);

/// Writes a (non-canonical) SMILES that re-parses to an isomorphic graph.
std::string write_smiles(const MoleculeGraph& graph);

/// Implicit hydrogen count under the default valence model; bracket atoms
/// report zero (their hydrogens are explicit).
int implicit_hydrogens(const MoleculeGraph& graph, int atom);

/// Smallest set of smallest rings. Each ring lists atom indices in cycle
/// order starting from its smallest atom.
std::vector<std::vector<int>> perceive_rings(const MoleculeGraph& graph);

/// Graph isomorphism preserving element, isotope, aromatic flag, charge,
/// hydrogen count, bond order and double-bond stereo.
bool isomorphic(const MoleculeGraph& lhs, const MoleculeGraph& rhs);

/// Order-independent 64-bit digest of the labeled graph; equal for
/// isomorphic graphs.
std::uint64_t graph_invariant(const MoleculeGraph& graph);

}  // namespace chemreward
