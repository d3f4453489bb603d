#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chemreward/molgraph.hpp"

namespace chemreward {

inline constexpr int kDefaultFingerprintRadius = 2;
inline constexpr int kDefaultFingerprintWidth = 2048;

/// Fixed-width circular fingerprint. Bit i lives in words[i / 64], bit i % 64.
struct Fingerprint {
  int radius = kDefaultFingerprintRadius;
  int width = kDefaultFingerprintWidth;
  std::vector<std::uint64_t> words;

  Fingerprint() = default;
  Fingerprint(int radius_, int width_);

  bool test(int bit) const { return (words.at(static_cast<std::size_t>(bit) / 64) >> (bit % 64)) & 1U; }
  void set(int bit) { words.at(static_cast<std::size_t>(bit) / 64) |= std::uint64_t{1} << (bit % 64); }
  int popcount() const noexcept;
  std::vector<int> on_bits() const;

  bool operator==(const Fingerprint&) const = default;
};

/// Morgan/ECFP-style fingerprint. Atom invariant: (atomic number, heavy
/// degree, formal charge, total H, ring membership, aromatic flag). Each
/// round rehashes an atom with its sorted (bond order, neighbor id) pairs;
/// every identifier of rounds 0..radius sets bit (id mod width). Hashing
/// uses combine64 (see hash.hpp), so bits are stable across platforms.
/// Throws Error("invalid_argument") for radius < 0 or a width that is not
/// a power of two.
Fingerprint morgan_fingerprint(const MoleculeGraph& graph, int radius = kDefaultFingerprintRadius,
                               int width = kDefaultFingerprintWidth);

/// |a & b| / |a | b|; 0.0 when both are empty. Throws Error("width_mismatch").
double tanimoto(const Fingerprint& a, const Fingerprint& b);

/// Atom-contribution table for the reduced Crippen-style LogP scheme.
struct CrippenTable {
  std::string version;
  std::map<std::string, double, std::less<>> values;

  /// Value for `type`, falling back to "default_<element>" and then
  /// "default" when the type is missing.
  double lookup(std::string_view type, std::string_view element) const;
};

CrippenTable parse_crippen_table(std::string_view text);
const CrippenTable& builtin_crippen_table();

/// Heavy-atom type per atom (e.g. "C_ar_h", "N_amine", "O_dbl"); elements
/// outside the organic subset get "default".
std::vector<std::string> crippen_atom_types(const MoleculeGraph& graph);

/// Hydrogen type for the hydrogens on `atom` ("H_C", "H_N", "H_O", "H_S", "H_other").
std::string crippen_hydrogen_type(const MoleculeGraph& graph, int atom);

/// Per-atom contribution: heavy-atom value plus total_h times the hydrogen value.
std::vector<double> crippen_contributions(const MoleculeGraph& graph,
                                          const CrippenTable& table = builtin_crippen_table());

double crippen_logp(const MoleculeGraph& graph, const CrippenTable& table = builtin_crippen_table());

struct DescriptorReport {
  double logp = 0.0;
  double mol_weight = 0.0;  // g/mol, implicit and bracket H included
  int hbd = 0;
  int hba = 0;
  int aromatic_rings = 0;
  int aliphatic_rings = 0;
  int stereocenters = 0;
  int heavy_atoms = 0;

  bool operator==(const DescriptorReport&) const = default;
};

/// hbd: O and N atoms carrying at least one H.
/// hba: O and N atoms, except pyrrole-type aromatic N (bearing H or three
/// ring/substituent bonds) and amide N (single-bonded to a C=O carbon).
/// A ring is aromatic when all of its atoms are.
DescriptorReport descriptor_report(const MoleculeGraph& graph);

struct LipinskiReport {
  bool mol_weight_ok = false;  // <= 500
  bool logp_ok = false;        // <= 5
  bool hbd_ok = false;         // <= 5
  bool hba_ok = false;         // <= 10

  bool pass() const noexcept { return mol_weight_ok && logp_ok && hbd_ok && hba_ok; }
  bool operator==(const LipinskiReport&) const = default;
};

LipinskiReport lipinski_report(const DescriptorReport& report);

}  // namespace chemreward
