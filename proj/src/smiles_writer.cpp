#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "chemreward/molgraph.hpp"

namespace chemreward {
namespace {

BondDirection reversed(BondDirection d) {
  if (d == BondDirection::Up) return BondDirection::Down;
  if (d == BondDirection::Down) return BondDirection::Up;
  return d;
}

class SmilesWriter {
 public:
  explicit SmilesWriter(const MoleculeGraph& g) : g_(g) {
    const std::size_t n = g.atom_count();
    visit_.assign(n, -1);
    parent_.assign(n, -1);
    parent_bond_.assign(n, -1);
    children_.resize(n);
    closures_.resize(n);
    openings_.resize(n);
    bond_seen_.assign(g.bond_count(), 0);
    digit_of_bond_.assign(g.bond_count(), -1);
  }

  std::string write() {
    std::string out;
    for (std::size_t s = 0; s < g_.atom_count(); ++s) {
      if (visit_[s] >= 0) continue;
      traverse(static_cast<int>(s));
      if (!out.empty()) out += '.';
      emit(static_cast<int>(s), out);
    }
    return out;
  }

 private:
  void traverse(int u) {
    visit_[static_cast<std::size_t>(u)] = counter_++;
    std::vector<MoleculeGraph::Neighbor> nbrs(g_.neighbors(u).begin(), g_.neighbors(u).end());
    std::sort(nbrs.begin(), nbrs.end(), [](const auto& x, const auto& y) { return x.atom < y.atom; });
    for (const auto& nb : nbrs) {
      auto e = static_cast<std::size_t>(nb.bond);
      if (bond_seen_[e]) continue;
      bond_seen_[e] = 1;
      if (visit_[static_cast<std::size_t>(nb.atom)] >= 0) {
        // Back edge: opened at the earlier atom, closed here.
        openings_[static_cast<std::size_t>(nb.atom)].push_back(nb.bond);
        closures_[static_cast<std::size_t>(u)].push_back(nb.bond);
        continue;
      }
      parent_[static_cast<std::size_t>(nb.atom)] = u;
      parent_bond_[static_cast<std::size_t>(nb.atom)] = nb.bond;
      children_[static_cast<std::size_t>(u)].push_back(nb.atom);
      traverse(nb.atom);
    }
  }

  int partner(int bond, int u) const { return g_.bond(bond).other(u); }

  std::string bond_symbol(int bond, int from) const {
    const Bond& b = g_.bond(bond);
    const bool both_aromatic = g_.atom(b.a).aromatic && g_.atom(b.b).aromatic;
    switch (b.order) {
      case BondOrder::Single: {
        BondDirection d = b.a == from ? b.direction : reversed(b.direction);
        if (d == BondDirection::Up) return "/";
        if (d == BondDirection::Down) return "\\";
        return both_aromatic ? "-" : "";
      }
      case BondOrder::Double: return "=";
      case BondOrder::Triple: return "#";
      case BondOrder::Aromatic: return (both_aromatic && g_.bond_in_ring(bond)) ? "" : ":";
    }
    return "";
  }

  int allocate_digit() {
    for (int d = 1; d < 100; ++d) {
      if (std::find(used_digits_.begin(), used_digits_.end(), d) == used_digits_.end()) {
        used_digits_.push_back(d);
        return d;
      }
    }
    throw Error("smiles_write_error", "more than 99 simultaneous ring bonds");
  }

  void release_digit(int d) { used_digits_.erase(std::find(used_digits_.begin(), used_digits_.end(), d)); }

  static std::string digit_text(int d) { return d < 10 ? std::to_string(d) : "%" + std::to_string(d); }

  Chirality output_chirality(int u, const std::vector<int>& out_order) const {
    const Atom& a = g_.atom(u);
    if (a.chirality == Chirality::None) return a.chirality;
    const auto& in_order = g_.chiral_order(u);
    if (in_order.size() != out_order.size()) return a.chirality;
    std::vector<std::size_t> perm;
    for (int ref : out_order) {
      auto it = std::find(in_order.begin(), in_order.end(), ref);
      if (it == in_order.end()) return a.chirality;
      perm.push_back(static_cast<std::size_t>(it - in_order.begin()));
    }
    int inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      for (std::size_t j = i + 1; j < perm.size(); ++j) {
        if (perm[i] > perm[j]) ++inversions;
      }
    }
    if (inversions % 2 == 0) return a.chirality;
    return a.chirality == Chirality::Clockwise ? Chirality::CounterClockwise : Chirality::Clockwise;
  }

  std::string atom_token(int u, Chirality chirality) const {
    const Atom& a = g_.atom(u);
    std::string symbol = a.element;
    if (a.aromatic) {
      for (auto& ch : symbol) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    if (!a.bracket) return symbol;
    std::string t = "[";
    if (a.isotope) t += std::to_string(*a.isotope);
    t += symbol;
    if (chirality == Chirality::CounterClockwise) t += "@";
    if (chirality == Chirality::Clockwise) t += "@@";
    if (a.explicit_h > 0) {
      t += "H";
      if (a.explicit_h > 1) t += std::to_string(a.explicit_h);
    }
    if (a.formal_charge != 0) {
      t += a.formal_charge > 0 ? "+" : "-";
      const int mag = std::abs(a.formal_charge);
      if (mag > 1) t += std::to_string(mag);
    }
    return t + "]";
  }

  void emit(int u, std::string& out) {
    const auto ui = static_cast<std::size_t>(u);
    auto by_visit = [&](int bu) {
      return [this, bu](int x, int y) {
        return visit_[static_cast<std::size_t>(partner(x, bu))] < visit_[static_cast<std::size_t>(partner(y, bu))];
      };
    };
    std::vector<int> closes = closures_[ui];
    std::vector<int> opens = openings_[ui];
    std::sort(closes.begin(), closes.end(), by_visit(u));
    std::sort(opens.begin(), opens.end(), by_visit(u));

    std::vector<int> out_order;
    if (parent_[ui] >= 0) out_order.push_back(parent_[ui]);
    if (g_.atom(u).explicit_h > 0) out_order.push_back(kImplicitHydrogenRef);
    for (int b : closes) out_order.push_back(partner(b, u));
    for (int b : opens) out_order.push_back(partner(b, u));
    for (int c : children_[ui]) out_order.push_back(c);

    out += atom_token(u, output_chirality(u, out_order));
    for (int b : closes) {
      const int d = digit_of_bond_[static_cast<std::size_t>(b)];
      out += digit_text(d);
      release_digit(d);
    }
    for (int b : opens) {
      const int d = allocate_digit();
      digit_of_bond_[static_cast<std::size_t>(b)] = d;
      out += bond_symbol(b, u) + digit_text(d);
    }
    const auto& kids = children_[ui];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const bool branch = k + 1 < kids.size();
      if (branch) out += '(';
      out += bond_symbol(parent_bond_[static_cast<std::size_t>(kids[k])], u);
      emit(kids[k], out);
      if (branch) out += ')';
    }
  }

  const MoleculeGraph& g_;
  int counter_ = 0;
  std::vector<int> visit_, parent_, parent_bond_;
  std::vector<std::vector<int>> children_, closures_, openings_;
  std::vector<std::uint8_t> bond_seen_;
  std::vector<int> digit_of_bond_;
  std::vector<int> used_digits_;
};

}  // namespace

std::string write_smiles(const MoleculeGraph& graph) { return SmilesWriter(graph).write(); }

}  // namespace chemreward
