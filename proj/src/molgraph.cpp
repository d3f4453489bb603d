#include "chemreward/molgraph.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <deque>
#include <set>
#include <string>
#include <utility>

#include "chemreward/hash.hpp"

namespace chemreward {

const char* to_code(SmilesErrorKind kind) noexcept {
  switch (kind) {
    case SmilesErrorKind::Syntax: return "syntax_error";
    case SmilesErrorKind::UnmatchedParenthesis: return "unmatched_parenthesis";
    case SmilesErrorKind::UnmatchedRingClosure: return "unmatched_ring_closure";
    case SmilesErrorKind::UnknownElement: return "unknown_element";
    case SmilesErrorKind::ValenceViolation: return "valence_violation";
    case SmilesErrorKind::Unsupported: return "unsupported_feature";
  }
  return "syntax_error";
}

namespace {

std::string describe(SmilesErrorKind kind, std::size_t offset, const std::string& detail,
                     std::optional<int> atom) {
  std::string msg = std::string(to_code(kind)) + " at offset " + std::to_string(offset);
  if (atom) msg += " (atom " + std::to_string(*atom) + ")";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

SmilesError::SmilesError(SmilesErrorKind kind, std::size_t offset, const std::string& detail,
                         std::optional<int> atom)
    : Error(to_code(kind), describe(kind, offset, detail, atom)),
      kind_(kind),
      offset_(offset),
      atom_(atom) {}

namespace {

using Bitset = std::vector<std::uint64_t>;

bool test_bit(const Bitset& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1U; }
void set_bit(Bitset& b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }

int lowest_bit(const Bitset& b) {
  for (std::size_t w = 0; w < b.size(); ++w) {
    if (b[w] != 0) return static_cast<int>(w * 64 + static_cast<std::size_t>(std::countr_zero(b[w])));
  }
  return -1;
}

using Adjacency = std::vector<std::vector<MoleculeGraph::Neighbor>>;

Adjacency build_adjacency(std::size_t n, const std::vector<Bond>& bonds) {
  Adjacency adj(n);
  for (std::size_t e = 0; e < bonds.size(); ++e) {
    adj[static_cast<std::size_t>(bonds[e].a)].push_back({bonds[e].b, static_cast<int>(e)});
    adj[static_cast<std::size_t>(bonds[e].b)].push_back({bonds[e].a, static_cast<int>(e)});
  }
  return adj;
}

std::vector<int> component_labels(const Adjacency& adj, int& count) {
  std::vector<int> label(adj.size(), -1);
  count = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (label[s] >= 0) continue;
    std::deque<int> queue{static_cast<int>(s)};
    label[s] = count;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (const auto& nb : adj[static_cast<std::size_t>(u)]) {
        if (label[static_cast<std::size_t>(nb.atom)] < 0) {
          label[static_cast<std::size_t>(nb.atom)] = count;
          queue.push_back(nb.atom);
        }
      }
    }
    ++count;
  }
  return label;
}

/// Rotates a cycle to start at its smallest atom, heading toward the
/// smaller of that atom's two cycle neighbors.
std::vector<int> canonical_cycle(std::vector<int> cycle) {
  auto it = std::min_element(cycle.begin(), cycle.end());
  std::rotate(cycle.begin(), it, cycle.end());
  if (cycle.size() > 2 && cycle.back() < cycle[1]) std::reverse(cycle.begin() + 1, cycle.end());
  return cycle;
}

// Minimum cycle basis: Horton candidate cycles (one per root and edge)
// sorted by length, kept greedily when GF(2)-independent of those before.
std::vector<std::vector<int>> smallest_rings(std::size_t n, const std::vector<Bond>& bonds,
                                             const Adjacency& adj) {
  int components = 0;
  component_labels(adj, components);
  const long target = static_cast<long>(bonds.size()) - static_cast<long>(n) + components;
  if (target <= 0) return {};

  const std::size_t words = (bonds.size() + 63) / 64;
  struct Candidate {
    std::vector<int> atoms;
    Bitset edges;
  };
  std::vector<Candidate> candidates;
  std::set<Bitset> seen;

  std::vector<int> dist(n), parent(n), parent_bond(n);
  std::vector<int> mark(n, -1);
  for (std::size_t root = 0; root < n; ++root) {
    if (adj[root].size() < 2) continue;
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(parent_bond.begin(), parent_bond.end(), -1);
    std::deque<int> queue{static_cast<int>(root)};
    dist[root] = 0;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (const auto& nb : adj[static_cast<std::size_t>(u)]) {
        auto v = static_cast<std::size_t>(nb.atom);
        if (dist[v] < 0) {
          dist[v] = dist[static_cast<std::size_t>(u)] + 1;
          parent[v] = u;
          parent_bond[v] = nb.bond;
          queue.push_back(nb.atom);
        }
      }
    }
    for (std::size_t e = 0; e < bonds.size(); ++e) {
      auto u = static_cast<std::size_t>(bonds[e].a);
      auto v = static_cast<std::size_t>(bonds[e].b);
      if (dist[u] < 0 || dist[v] < 0) continue;
      if (parent_bond[u] == static_cast<int>(e) || parent_bond[v] == static_cast<int>(e)) continue;
      // Paths to root must meet only at the root.
      const int stamp = static_cast<int>(root * bonds.size() + e);
      bool disjoint = true;
      for (int x = static_cast<int>(u); x != static_cast<int>(root); x = parent[static_cast<std::size_t>(x)]) {
        mark[static_cast<std::size_t>(x)] = stamp;
      }
      for (int x = static_cast<int>(v); x != static_cast<int>(root); x = parent[static_cast<std::size_t>(x)]) {
        if (mark[static_cast<std::size_t>(x)] == stamp) {
          disjoint = false;
          break;
        }
      }
      if (!disjoint) continue;

      Candidate c;
      c.edges.assign(words, 0);
      std::vector<int> up;  // root .. u
      for (int x = static_cast<int>(u); x != static_cast<int>(root); x = parent[static_cast<std::size_t>(x)]) {
        up.push_back(x);
        set_bit(c.edges, static_cast<std::size_t>(parent_bond[static_cast<std::size_t>(x)]));
      }
      up.push_back(static_cast<int>(root));
      std::reverse(up.begin(), up.end());
      c.atoms = up;
      for (int x = static_cast<int>(v); x != static_cast<int>(root); x = parent[static_cast<std::size_t>(x)]) {
        c.atoms.push_back(x);
        set_bit(c.edges, static_cast<std::size_t>(parent_bond[static_cast<std::size_t>(x)]));
      }
      set_bit(c.edges, e);
      if (c.atoms.size() < 3) continue;
      if (!seen.insert(c.edges).second) continue;
      c.atoms = canonical_cycle(std::move(c.atoms));
      candidates.push_back(std::move(c));
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.atoms.size() != y.atoms.size()) return x.atoms.size() < y.atoms.size();
    return x.atoms < y.atoms;
  });

  std::vector<std::pair<int, Bitset>> basis;  // (pivot, row), sorted by pivot
  std::vector<std::vector<int>> rings;
  for (const auto& c : candidates) {
    Bitset x = c.edges;
    for (const auto& [pivot, row] : basis) {
      if (test_bit(x, static_cast<std::size_t>(pivot))) {
        for (std::size_t w = 0; w < words; ++w) x[w] ^= row[w];
      }
    }
    int pivot = lowest_bit(x);
    if (pivot < 0) continue;
    auto pos = std::lower_bound(basis.begin(), basis.end(), pivot,
                                [](const auto& row, int p) { return row.first < p; });
    basis.insert(pos, {pivot, std::move(x)});
    rings.push_back(c.atoms);
    if (static_cast<long>(rings.size()) == target) break;
  }
  std::sort(rings.begin(), rings.end(), [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
  });
  return rings;
}

struct ValenceRule {
  int atomic_number;
  std::array<int, 3> valences;  // ascending, 0 = unused
};

constexpr std::array<ValenceRule, 9> kOrganicValences{{
    {5, {3, 0, 0}},
    {6, {4, 0, 0}},
    {7, {3, 5, 0}},
    {8, {2, 0, 0}},
    {15, {3, 5, 0}},
    {16, {2, 4, 6}},
    {9, {1, 0, 0}},
    {17, {1, 0, 0}},
    {35, {1, 0, 0}},
}};

const ValenceRule* organic_rule(int z) {
  if (z == 53) {
    static constexpr ValenceRule iodine{53, {1, 0, 0}};
    return &iodine;
  }
  for (const auto& r : kOrganicValences) {
    if (r.atomic_number == z) return &r;
  }
  return nullptr;
}

int bond_valence(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return 1;
    case BondOrder::Double: return 2;
    case BondOrder::Triple: return 3;
    case BondOrder::Aromatic: return 1;
  }
  return 1;
}

// Upper bound on bonded valence (including explicit H) for bracket atoms;
// nullopt when the element/charge combination is not checked.
std::optional<int> bracket_max_valence(int z, int charge) {
  switch (z) {
    case 5: return charge == 0 ? 3 : charge == -1 ? std::optional<int>{4} : std::nullopt;
    case 6: return charge == 0 ? 4 : (charge == 1 || charge == -1) ? std::optional<int>{3} : std::nullopt;
    case 7: return charge == 0 ? 5 : charge == 1 ? 4 : charge == -1 ? std::optional<int>{2} : std::nullopt;
    case 8: return charge == 0 ? 2 : charge == 1 ? 3 : charge == -1 ? std::optional<int>{1} : std::nullopt;
    case 9: return charge == 0 ? std::optional<int>{1} : std::nullopt;
    case 17:
    case 35:
    case 53: return charge == 0 ? std::optional<int>{7} : std::nullopt;
    default: return std::nullopt;
  }
}

struct HydrogenResult {
  int count = 0;
  bool violation = false;
};

HydrogenResult compute_hydrogens(const Atom& atom, std::span<const MoleculeGraph::Neighbor> nbrs,
                                 const std::vector<Bond>& bonds) {
  int valence = 0;
  bool has_double = false;
  for (const auto& nb : nbrs) {
    const Bond& b = bonds[static_cast<std::size_t>(nb.bond)];
    valence += bond_valence(b.order);
    if (b.order == BondOrder::Double) has_double = true;
  }
  if (atom.bracket) {
    if (auto max = bracket_max_valence(atom.atomic_number, atom.formal_charge)) {
      if (valence + atom.explicit_h > *max) return {0, true};
    }
    return {0, false};
  }
  const ValenceRule* rule = organic_rule(atom.atomic_number);
  if (rule == nullptr) return {0, false};
  const int max_valence = *std::max_element(rule->valences.begin(), rule->valences.end());
  if (valence > max_valence) return {0, true};
  if (atom.aromatic) {
    // Aromatic atoms: one valence unit goes to the pi system for B, C, N, P
    // unless an exocyclic double bond already carries it.
    const bool donates_pi = atom.atomic_number == 5 || atom.atomic_number == 6 ||
                            atom.atomic_number == 7 || atom.atomic_number == 15;
    const int pi = (donates_pi && !has_double) ? 1 : 0;
    const int lowest = rule->valences[0];
    return {std::max(0, lowest - valence - pi), false};
  }
  for (int v : rule->valences) {
    if (v != 0 && v >= valence) return {v - valence, false};
  }
  return {0, true};
}

}  // namespace

MoleculeGraph::MoleculeGraph(std::vector<Atom> atoms, std::vector<Bond> bonds,
                             std::vector<std::vector<int>> chiral_orders)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)), chiral_orders_(std::move(chiral_orders)) {
  const std::size_t n = atoms_.size();
  for (std::size_t i = 0; i < n; ++i) atoms_[i].index = static_cast<int>(i);
  chiral_orders_.resize(n);

  std::set<std::pair<int, int>> pairs;
  for (const auto& b : bonds_) {
    if (b.a == b.b || b.a < 0 || b.b < 0 || static_cast<std::size_t>(b.a) >= n ||
        static_cast<std::size_t>(b.b) >= n) {
      throw Error("invalid_graph", "bond endpoints must be distinct existing atoms");
    }
    if (!pairs.insert(std::minmax(b.a, b.b)).second) {
      throw Error("invalid_graph", "duplicate bond between atoms " + std::to_string(b.a) + " and " +
                                       std::to_string(b.b));
    }
  }

  adjacency_ = build_adjacency(n, bonds_);
  auto labels = component_labels(adjacency_, fragment_count_);
  for (std::size_t i = 0; i < n; ++i) atoms_[i].fragment = labels[i];

  rings_ = smallest_rings(n, bonds_, adjacency_);
  atom_in_ring_.assign(n, 0);
  bond_in_ring_.assign(bonds_.size(), 0);
  for (const auto& ring : rings_) {
    for (std::size_t k = 0; k < ring.size(); ++k) {
      int u = ring[k];
      int v = ring[(k + 1) % ring.size()];
      atom_in_ring_[static_cast<std::size_t>(u)] = 1;
      bond_in_ring_[static_cast<std::size_t>(bond_between(u, v))] = 1;
    }
  }

  implicit_h_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto h = compute_hydrogens(atoms_[i], adjacency_[i], bonds_);
    if (h.violation) {
      throw SmilesError(SmilesErrorKind::ValenceViolation, atoms_[i].offset,
                        "element " + atoms_[i].element + " exceeds its allowed valence",
                        static_cast<int>(i));
    }
    implicit_h_[i] = h.count;
  }
}

int MoleculeGraph::bond_between(int i, int j) const {
  for (const auto& nb : neighbors(i)) {
    if (nb.atom == j) return nb.bond;
  }
  return -1;
}

MoleculeGraph MoleculeGraph::renumbered(std::span<const int> new_index) const {
  const std::size_t n = atoms_.size();
  if (new_index.size() != n) throw Error("invalid_graph", "renumbering size mismatch");
  std::vector<Atom> atoms(n);
  std::vector<std::vector<int>> orders(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto j = static_cast<std::size_t>(new_index[i]);
    atoms[j] = atoms_[i];
    for (int ref : chiral_orders_[i]) {
      orders[j].push_back(ref == kImplicitHydrogenRef ? ref : new_index[static_cast<std::size_t>(ref)]);
    }
  }
  std::vector<Bond> bonds = bonds_;
  for (auto& b : bonds) {
    b.a = new_index[static_cast<std::size_t>(b.a)];
    b.b = new_index[static_cast<std::size_t>(b.b)];
  }
  return MoleculeGraph(std::move(atoms), std::move(bonds), std::move(orders));
}

int implicit_hydrogens(const MoleculeGraph& graph, int atom) { return graph.implicit_h(atom); }

std::vector<std::vector<int>> perceive_rings(const MoleculeGraph& graph) {
  return smallest_rings(graph.atom_count(), graph.bonds(),
                        build_adjacency(graph.atom_count(), graph.bonds()));
}

namespace {

std::uint64_t atom_label(const MoleculeGraph& g, int i) {
  const Atom& a = g.atom(i);
  std::uint64_t h = mix64(static_cast<std::uint64_t>(a.atomic_number));
  h = combine64(h, static_cast<std::uint64_t>(a.isotope.value_or(0)));
  h = combine64(h, a.aromatic ? 1 : 0);
  h = combine64(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(a.formal_charge)));
  h = combine64(h, static_cast<std::uint64_t>(g.total_h(i)));
  h = combine64(h, static_cast<std::uint64_t>(g.degree(i)));
  return combine64(h, a.chirality != Chirality::None ? 1 : 0);
}

std::uint64_t bond_label(const Bond& b) {
  return static_cast<std::uint64_t>(b.order) * 4 + static_cast<std::uint64_t>(b.stereo);
}

// Weisfeiler-Lehman refinement with hashed colors, run for a fixed number
// of rounds so colors stay comparable between graphs.
std::vector<std::uint64_t> refined_colors(const MoleculeGraph& g, std::size_t rounds) {
  const auto n = static_cast<int>(g.atom_count());
  std::vector<std::uint64_t> color(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) color[static_cast<std::size_t>(i)] = atom_label(g, i);
  std::vector<std::uint64_t> next(color.size());
  std::vector<std::uint64_t> env;
  for (std::size_t r = 0; r < rounds; ++r) {
    for (int i = 0; i < n; ++i) {
      env.clear();
      for (const auto& nb : g.neighbors(i)) {
        env.push_back(combine64(bond_label(g.bond(nb.bond)), color[static_cast<std::size_t>(nb.atom)]));
      }
      std::sort(env.begin(), env.end());
      std::uint64_t h = color[static_cast<std::size_t>(i)];
      for (auto e : env) h = combine64(h, e);
      next[static_cast<std::size_t>(i)] = h;
    }
    color.swap(next);
  }
  return color;
}

std::size_t refinement_rounds(const MoleculeGraph& g) { return std::min<std::size_t>(g.atom_count(), 12); }

class IsomorphismSearch {
 public:
  IsomorphismSearch(const MoleculeGraph& a, const MoleculeGraph& b,
                    std::vector<std::uint64_t> ca, std::vector<std::uint64_t> cb)
      : a_(a), b_(b), ca_(std::move(ca)), cb_(std::move(cb)) {
    map_.assign(a.atom_count(), -1);
    used_.assign(b.atom_count(), 0);
    build_order();
  }

  bool run() { return extend(0); }

 private:
  void build_order() {
    std::vector<std::uint8_t> seen(a_.atom_count(), 0);
    for (std::size_t s = 0; s < a_.atom_count(); ++s) {
      if (seen[s]) continue;
      std::deque<int> queue{static_cast<int>(s)};
      seen[s] = 1;
      while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        order_.push_back(u);
        for (const auto& nb : a_.neighbors(u)) {
          if (!seen[static_cast<std::size_t>(nb.atom)]) {
            seen[static_cast<std::size_t>(nb.atom)] = 1;
            queue.push_back(nb.atom);
          }
        }
      }
    }
  }

  bool compatible(int u, int v) const {
    const Atom& x = a_.atom(u);
    const Atom& y = b_.atom(v);
    if (x.atomic_number != y.atomic_number || x.aromatic != y.aromatic ||
        x.formal_charge != y.formal_charge || x.isotope != y.isotope ||
        a_.total_h(u) != b_.total_h(v) || a_.degree(u) != b_.degree(v)) {
      return false;
    }
    for (const auto& nb : a_.neighbors(u)) {
      int mapped = map_[static_cast<std::size_t>(nb.atom)];
      if (mapped < 0) continue;
      int e = b_.bond_between(v, mapped);
      if (e < 0) return false;
      const Bond& bx = a_.bond(nb.bond);
      const Bond& by = b_.bond(e);
      if (bx.order != by.order || bx.stereo != by.stereo) return false;
    }
    return true;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size()) return true;
    const int u = order_[depth];
    for (std::size_t v = 0; v < b_.atom_count(); ++v) {
      if (used_[v] || cb_[v] != ca_[static_cast<std::size_t>(u)]) continue;
      if (!compatible(u, static_cast<int>(v))) continue;
      map_[static_cast<std::size_t>(u)] = static_cast<int>(v);
      used_[v] = 1;
      if (extend(depth + 1)) return true;
      map_[static_cast<std::size_t>(u)] = -1;
      used_[v] = 0;
    }
    return false;
  }

  const MoleculeGraph& a_;
  const MoleculeGraph& b_;
  std::vector<std::uint64_t> ca_, cb_;
  std::vector<int> map_;
  std::vector<std::uint8_t> used_;
  std::vector<int> order_;
};

}  // namespace

bool isomorphic(const MoleculeGraph& lhs, const MoleculeGraph& rhs) {
  if (lhs.atom_count() != rhs.atom_count() || lhs.bond_count() != rhs.bond_count()) return false;
  const std::size_t rounds = refinement_rounds(lhs);
  auto ca = refined_colors(lhs, rounds);
  auto cb = refined_colors(rhs, rounds);
  auto sa = ca, sb = cb;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) return false;
  return IsomorphismSearch(lhs, rhs, std::move(ca), std::move(cb)).run();
}

std::uint64_t graph_invariant(const MoleculeGraph& graph) {
  auto colors = refined_colors(graph, refinement_rounds(graph));
  std::sort(colors.begin(), colors.end());
  std::uint64_t h = combine64(graph.atom_count(), graph.bond_count());
  for (auto c : colors) h = combine64(h, c);
  return h;
}

}  // namespace chemreward
