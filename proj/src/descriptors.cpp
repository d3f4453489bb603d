#include "chemreward/descriptors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <utility>

#include "chemreward/elements.hpp"
#include "chemreward/hash.hpp"
#include "chemreward/resources.hpp"
#include "chemreward/text.hpp"

namespace chemreward {

Fingerprint::Fingerprint(int radius_, int width_)
    : radius(radius_), width(width_), words(static_cast<std::size_t>((width_ + 63) / 64), 0) {}

int Fingerprint::popcount() const noexcept {
  int n = 0;
  for (auto w : words) n += std::popcount(w);
  return n;
}

std::vector<int> Fingerprint::on_bits() const {
  std::vector<int> out;
  for (int i = 0; i < width; ++i) {
    if (test(i)) out.push_back(i);
  }
  return out;
}

Fingerprint morgan_fingerprint(const MoleculeGraph& graph, int radius, int width) {
  if (radius < 0) throw Error("invalid_argument", "fingerprint radius must be >= 0");
  if (width <= 0 || !std::has_single_bit(static_cast<unsigned>(width))) {
    throw Error("invalid_argument", "fingerprint width must be a power of two");
  }
  Fingerprint fp(radius, width);
  const auto mask = static_cast<std::uint64_t>(width - 1);
  const std::size_t n = graph.atom_count();

  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int ai = static_cast<int>(i);
    const Atom& a = graph.atom(ai);
    std::uint64_t h = mix64(static_cast<std::uint64_t>(a.atomic_number));
    h = combine64(h, static_cast<std::uint64_t>(graph.degree(ai)));
    h = combine64(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(a.formal_charge)));
    h = combine64(h, static_cast<std::uint64_t>(graph.total_h(ai)));
    h = combine64(h, graph.atom_in_ring(ai) ? 1U : 0U);
    h = combine64(h, a.aromatic ? 1U : 0U);
    ids[i] = h;
    fp.set(static_cast<int>(h & mask));
  }

  std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
  for (int round = 1; round <= radius; ++round) {
    std::vector<std::uint64_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      env.clear();
      for (const auto& nb : graph.neighbors(static_cast<int>(i))) {
        env.emplace_back(static_cast<std::uint64_t>(graph.bond(nb.bond).order), ids[static_cast<std::size_t>(nb.atom)]);
      }
      std::sort(env.begin(), env.end());
      std::uint64_t h = combine64(ids[i], static_cast<std::uint64_t>(round));
      for (const auto& [order, id] : env) {
        h = combine64(h, order);
        h = combine64(h, id);
      }
      next[i] = h;
      fp.set(static_cast<int>(h & mask));
    }
    ids = std::move(next);
  }
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.width != b.width || a.words.size() != b.words.size()) {
    throw Error("width_mismatch", "fingerprint widths differ: " + std::to_string(a.width) + " vs " +
                                      std::to_string(b.width));
  }
  int both = 0;
  int either = 0;
  for (std::size_t i = 0; i < a.words.size(); ++i) {
    both += std::popcount(a.words[i] & b.words[i]);
    either += std::popcount(a.words[i] | b.words[i]);
  }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

double CrippenTable::lookup(std::string_view type, std::string_view element) const {
  if (auto it = values.find(type); it != values.end()) return it->second;
  if (auto it = values.find("default_" + std::string(element)); it != values.end()) return it->second;
  if (auto it = values.find("default"); it != values.end()) return it->second;
  return 0.0;
}

CrippenTable parse_crippen_table(std::string_view body) {
  CrippenTable table;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(body, '\n', false)) {
    ++line_no;
    auto line = text::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view key = "#version=";
      if (line.substr(0, key.size()) == key) table.version = std::string(line.substr(key.size()));
      continue;
    }
    auto fields = text::split(line, '\t');
    if (fields.size() < 2) {
      throw Error("crippen_table_error", "line " + std::to_string(line_no) + ": expected type<TAB>value");
    }
    double value = 0.0;
    const auto& v = fields[1];
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
      throw Error("crippen_table_error", "line " + std::to_string(line_no) + ": bad value '" + v + "'");
    }
    if (!table.values.emplace(fields[0], value).second) {
      throw Error("crippen_table_error", "line " + std::to_string(line_no) + ": duplicate type " + fields[0]);
    }
  }
  if (!table.values.count("default")) throw Error("crippen_table_error", "table lacks a 'default' entry");
  return table;
}

const CrippenTable& builtin_crippen_table() {
  static const CrippenTable table = parse_crippen_table(*resources::find("crippen_lite.tsv"));
  return table;
}

namespace {

bool is_hetero(const Atom& a) { return a.atomic_number != 6 && a.atomic_number != 1; }

struct Environment {
  bool hetero_neighbor = false;       // any non-C heavy neighbor
  bool ring_hetero_neighbor = false;  // hetero neighbor through an aromatic bond
  bool multiple_bond = false;         // double or triple bond
  bool double_to_o = false;
  bool aromatic_neighbor = false;
  bool on_substituent = false;        // exocyclic N or O neighbor
  int double_partner = 0;             // atomic number across a double bond
  bool conjugated_neighbor = false;   // neighbor is aromatic or carries a multiple bond
};

bool has_multiple_bond(const MoleculeGraph& g, int atom) {
  for (const auto& nb : g.neighbors(atom)) {
    auto order = g.bond(nb.bond).order;
    if (order == BondOrder::Double || order == BondOrder::Triple) return true;
  }
  return false;
}

Environment environment(const MoleculeGraph& g, int atom) {
  Environment env;
  for (const auto& nb : g.neighbors(atom)) {
    const Atom& other = g.atom(nb.atom);
    const auto order = g.bond(nb.bond).order;
    if (is_hetero(other)) {
      env.hetero_neighbor = true;
      if (order == BondOrder::Aromatic) env.ring_hetero_neighbor = true;
    }
    if (order == BondOrder::Double || order == BondOrder::Triple) env.multiple_bond = true;
    if (order == BondOrder::Double && other.atomic_number == 8) env.double_to_o = true;
    if (order == BondOrder::Double) env.double_partner = other.atomic_number;
    if (other.aromatic) env.aromatic_neighbor = true;
    if (order != BondOrder::Aromatic && (other.atomic_number == 7 || other.atomic_number == 8)) {
      env.on_substituent = true;
    }
    if (other.aromatic || has_multiple_bond(g, nb.atom)) env.conjugated_neighbor = true;
  }
  return env;
}

std::string carbon_type(const MoleculeGraph& g, int i, const Atom& a, const Environment& env) {
  if (a.aromatic) {
    if (env.ring_hetero_neighbor) return "C_ar_xring";
    if (env.hetero_neighbor) return env.on_substituent ? "C_ar_on" : "C_ar_xsub";
    return g.total_h(i) > 0 ? "C_ar_h" : "C_ar";
  }
  if (env.double_to_o) return "C_carbonyl";
  if (env.multiple_bond) return env.hetero_neighbor ? "C_sp2_x" : "C_sp2";
  if (env.hetero_neighbor) return "C_sp3_x";
  if (env.aromatic_neighbor) return "C_sp3_ar";
  return g.total_h(i) >= 2 ? "C_sp3_prim" : "C_sp3_sub";
}

std::string nitrogen_type(const MoleculeGraph& g, int i, const Atom& a, const Environment& env) {
  if (a.formal_charge > 0) return g.total_h(i) > 0 ? "N_plus_h" : "N_plus";
  if (a.aromatic) return g.total_h(i) > 0 ? "N_ar_h" : "N_ar";
  if (env.multiple_bond) return "N_unsat";
  if (env.conjugated_neighbor) return "N_conj";
  return "N_amine";
}

std::string oxygen_type(const MoleculeGraph& g, int i, const Atom& a, const Environment& env) {
  if (a.formal_charge < 0) return "O_minus";
  if (a.aromatic) return "O_ar";
  if (env.multiple_bond) return env.double_partner == 6 ? "O_dbl" : "O_dbl_x";
  if (g.total_h(i) > 0) return env.conjugated_neighbor ? "O_h_conj" : "O_h";
  if (env.aromatic_neighbor) return "O_ether_ar";
  return env.conjugated_neighbor ? "O_ether_conj" : "O_ether";
}

std::string sulfur_type(const Atom& a, const Environment& env) {
  if (a.aromatic) return "S_ar";
  if (env.multiple_bond) return "S_ox";
  return "S";
}

}  // namespace

std::vector<std::string> crippen_atom_types(const MoleculeGraph& graph) {
  std::vector<std::string> types;
  types.reserve(graph.atom_count());
  for (std::size_t idx = 0; idx < graph.atom_count(); ++idx) {
    const int i = static_cast<int>(idx);
    const Atom& a = graph.atom(i);
    const auto env = environment(graph, i);
    switch (a.atomic_number) {
      case 6: types.push_back(carbon_type(graph, i, a, env)); break;
      case 7: types.push_back(nitrogen_type(graph, i, a, env)); break;
      case 8: types.push_back(oxygen_type(graph, i, a, env)); break;
      case 16: types.push_back(sulfur_type(a, env)); break;
      case 5: case 9: case 14: case 15: case 17: case 35: case 53: types.push_back(a.element); break;
      default: types.push_back("default"); break;
    }
  }
  return types;
}

std::string crippen_hydrogen_type(const MoleculeGraph& graph, int atom) {
  switch (graph.atom(atom).atomic_number) {
    case 6: return "H_C";
    case 7: return "H_N";
    case 8: return "H_O";
    case 16: return "H_S";
    default: return "H_other";
  }
}

std::vector<double> crippen_contributions(const MoleculeGraph& graph, const CrippenTable& table) {
  const auto types = crippen_atom_types(graph);
  std::vector<double> out(graph.atom_count(), 0.0);
  for (std::size_t idx = 0; idx < graph.atom_count(); ++idx) {
    const int i = static_cast<int>(idx);
    const Atom& a = graph.atom(i);
    double v = table.lookup(types[idx], a.element);
    if (const int h = graph.total_h(i); h > 0) v += h * table.lookup(crippen_hydrogen_type(graph, i), "H");
    out[idx] = v;
  }
  return out;
}

double crippen_logp(const MoleculeGraph& graph, const CrippenTable& table) {
  double sum = 0.0;
  for (double v : crippen_contributions(graph, table)) sum += v;
  return sum;
}

namespace {

bool is_amide_nitrogen(const MoleculeGraph& g, int n) {
  for (const auto& nb : g.neighbors(n)) {
    if (g.bond(nb.bond).order != BondOrder::Single || g.atom(nb.atom).atomic_number != 6) continue;
    for (const auto& nb2 : g.neighbors(nb.atom)) {
      if (g.bond(nb2.bond).order == BondOrder::Double && g.atom(nb2.atom).atomic_number == 8) return true;
    }
  }
  return false;
}

}  // namespace

DescriptorReport descriptor_report(const MoleculeGraph& graph) {
  DescriptorReport r;
  r.logp = crippen_logp(graph);
  for (std::size_t idx = 0; idx < graph.atom_count(); ++idx) {
    const int i = static_cast<int>(idx);
    const Atom& a = graph.atom(i);
    const int h = graph.total_h(i);
    auto info = element_by_number(a.atomic_number);
    r.mol_weight += (info ? info->mass : 0.0) + h * kHydrogenMass;
    if (a.atomic_number != 1) ++r.heavy_atoms;
    if (a.chirality != Chirality::None) ++r.stereocenters;
    if (a.atomic_number == 7 || a.atomic_number == 8) {
      if (h > 0) ++r.hbd;
      bool acceptor = true;
      if (a.atomic_number == 7) {
        if (a.aromatic && (h > 0 || graph.degree(i) >= 3)) acceptor = false;
        if (!a.aromatic && is_amide_nitrogen(graph, i)) acceptor = false;
      }
      if (acceptor) ++r.hba;
    }
  }
  for (const auto& ring : graph.rings()) {
    const bool aromatic = std::all_of(ring.begin(), ring.end(), [&](int a) { return graph.atom(a).aromatic; });
    (aromatic ? r.aromatic_rings : r.aliphatic_rings)++;
  }
  return r;
}

LipinskiReport lipinski_report(const DescriptorReport& report) {
  LipinskiReport l;
  l.mol_weight_ok = report.mol_weight <= 500.0;
  l.logp_ok = report.logp <= 5.0;
  l.hbd_ok = report.hbd <= 5;
  l.hba_ok = report.hba <= 10;
  return l;
}

}  // namespace chemreward
