#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "chemreward/elements.hpp"
#include "chemreward/molgraph.hpp"

namespace chemreward {
namespace {

struct PendingBond {
  BondOrder order = BondOrder::Single;
  BondDirection direction = BondDirection::None;
  bool is_set = false;
  std::size_t offset = 0;
};

struct OpenRing {
  int atom;
  PendingBond bond;
  std::size_t offset;
  std::size_t slot;  // position reserved in the atom's neighbor order
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

class SmilesReader {
 public:
  explicit SmilesReader(std::string_view text) : text_(text) {}

  MoleculeGraph read() {
    std::size_t begin = 0;
    std::size_t end = text_.size();
    while (begin < end && is_space(text_[begin])) ++begin;
    while (end > begin && is_space(text_[end - 1])) --end;
    if (begin == end) throw SmilesError(SmilesErrorKind::Syntax, 0, "empty SMILES");

    pos_ = begin;
    while (pos_ < end) {
      const char c = text_[pos_];
      switch (c) {
        case '(': open_branch(); break;
        case ')': close_branch(); break;
        case '.': dot(); break;
        case '-': set_bond(BondOrder::Single, BondDirection::None); break;
        case '=': set_bond(BondOrder::Double, BondDirection::None); break;
        case '#': set_bond(BondOrder::Triple, BondDirection::None); break;
        case ':': set_bond(BondOrder::Aromatic, BondDirection::None); break;
        case '/': set_bond(BondOrder::Single, BondDirection::Up); break;
        case '\\': set_bond(BondOrder::Single, BondDirection::Down); break;
        case '$': throw SmilesError(SmilesErrorKind::Unsupported, pos_, "quadruple bonds are not supported");
        case '*': throw SmilesError(SmilesErrorKind::Unsupported, pos_, "wildcard atoms are not supported");
        case '>': throw SmilesError(SmilesErrorKind::Unsupported, pos_, "reaction SMILES are not supported");
        case '[': bracket_atom(end); break;
        case '%': ring_bond(end); break;
        default:
          if (std::isdigit(static_cast<unsigned char>(c))) {
            ring_bond(end);
          } else if (std::isalpha(static_cast<unsigned char>(c))) {
            organic_atom(end);
          } else {
            throw SmilesError(SmilesErrorKind::Syntax, pos_, std::string("unexpected character '") + c + "'");
          }
      }
    }

    if (!branches_.empty()) {
      throw SmilesError(SmilesErrorKind::UnmatchedParenthesis, branches_.back().second, "unclosed branch");
    }
    if (!rings_.empty()) {
      const auto& first = *std::min_element(rings_.begin(), rings_.end(), [](const auto& x, const auto& y) {
        return x.second.offset < y.second.offset;
      });
      throw SmilesError(SmilesErrorKind::UnmatchedRingClosure, first.second.offset,
                        "ring bond " + std::to_string(first.first) + " never closed");
    }
    if (pending_.is_set) throw SmilesError(SmilesErrorKind::Syntax, pending_.offset, "dangling bond");
    if (atoms_.empty()) throw SmilesError(SmilesErrorKind::Syntax, begin, "no atoms");
    return finish();
  }

 private:
  void open_branch() {
    if (prev_ < 0) throw SmilesError(SmilesErrorKind::Syntax, pos_, "branch without a preceding atom");
    if (pending_.is_set) throw SmilesError(SmilesErrorKind::Syntax, pending_.offset, "bond before branch");
    branches_.emplace_back(prev_, pos_);
    last_was_open_ = true;
    ++pos_;
  }

  void close_branch() {
    if (branches_.empty()) throw SmilesError(SmilesErrorKind::UnmatchedParenthesis, pos_, "unbalanced ')'");
    if (pending_.is_set) throw SmilesError(SmilesErrorKind::Syntax, pending_.offset, "dangling bond");
    if (prev_ < 0 || last_was_open_) throw SmilesError(SmilesErrorKind::Syntax, pos_, "empty branch");
    prev_ = branches_.back().first;
    branches_.pop_back();
    ++pos_;
  }

  void dot() {
    if (pending_.is_set) throw SmilesError(SmilesErrorKind::Syntax, pending_.offset, "dangling bond");
    if (prev_ < 0) throw SmilesError(SmilesErrorKind::Syntax, pos_, "empty fragment");
    prev_ = -1;
    ++pos_;
  }

  void set_bond(BondOrder order, BondDirection direction) {
    if (pending_.is_set) throw SmilesError(SmilesErrorKind::Syntax, pos_, "consecutive bond symbols");
    if (prev_ < 0) throw SmilesError(SmilesErrorKind::Syntax, pos_, "bond without a preceding atom");
    pending_ = {order, direction, true, pos_};
    ++pos_;
  }

  void ring_bond(std::size_t end) {
    const std::size_t start = pos_;
    if (prev_ < 0) throw SmilesError(SmilesErrorKind::Syntax, pos_, "ring bond without a preceding atom");
    int number = 0;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= end || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2]))) {
        throw SmilesError(SmilesErrorKind::Syntax, pos_, "'%' must be followed by two digits");
      }
      number = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      number = text_[pos_] - '0';
      ++pos_;
    }
    PendingBond bond = pending_;
    pending_ = {};

    auto it = rings_.find(number);
    if (it == rings_.end()) {
      order_[static_cast<std::size_t>(prev_)].push_back(kImplicitHydrogenRef);
      rings_[number] = {prev_, bond, start, order_[static_cast<std::size_t>(prev_)].size() - 1};
      return;
    }
    OpenRing open = it->second;
    rings_.erase(it);
    if (open.atom == prev_) throw SmilesError(SmilesErrorKind::Syntax, start, "ring bond to itself");
    if (open.bond.is_set && bond.is_set && open.bond.order != bond.order) {
      throw SmilesError(SmilesErrorKind::Syntax, start, "conflicting ring-bond orders");
    }
    for (const auto& b : bonds_) {
      if ((b.a == open.atom && b.b == prev_) || (b.a == prev_ && b.b == open.atom)) {
        throw SmilesError(SmilesErrorKind::Syntax, start, "duplicate bond via ring closure");
      }
    }
    Bond b;
    b.a = open.atom;
    b.b = prev_;
    bool implicit = false;
    if (open.bond.is_set) {
      b.order = open.bond.order;
      b.direction = open.bond.direction;
    } else if (bond.is_set) {
      b.order = bond.order;
      // Written at the closing atom: direction runs closer -> opener.
      b.direction = flip(bond.direction);
    } else {
      implicit = true;
      b.order = default_order(open.atom, prev_);
    }
    add_bond(b, implicit);
    order_[static_cast<std::size_t>(open.atom)][open.slot] = prev_;
    order_[static_cast<std::size_t>(prev_)].push_back(open.atom);
  }

  static BondDirection flip(BondDirection d) {
    if (d == BondDirection::Up) return BondDirection::Down;
    if (d == BondDirection::Down) return BondDirection::Up;
    return d;
  }

  BondOrder default_order(int a, int b) const {
    return atoms_[static_cast<std::size_t>(a)].aromatic && atoms_[static_cast<std::size_t>(b)].aromatic
               ? BondOrder::Aromatic
               : BondOrder::Single;
  }

  void add_bond(const Bond& b, bool implicit) {
    bonds_.push_back(b);
    implicit_bond_.push_back(implicit ? 1 : 0);
  }

  void organic_atom(std::size_t end) {
    const std::size_t start = pos_;
    const char c = text_[pos_];
    Atom atom;
    atom.offset = start;
    atom.bracket = false;
    std::string symbol;
    if (c == 'C' && pos_ + 1 < end && text_[pos_ + 1] == 'l') {
      symbol = "Cl";
    } else if (c == 'B' && pos_ + 1 < end && text_[pos_ + 1] == 'r') {
      symbol = "Br";
    } else {
      switch (c) {
        case 'B': case 'C': case 'N': case 'O': case 'P': case 'S': case 'F': case 'I':
          symbol = std::string(1, c);
          break;
        case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
          symbol = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
          atom.aromatic = true;
          break;
        default:
          throw SmilesError(SmilesErrorKind::UnknownElement, start,
                            std::string("'") + c + "' is not an organic-subset element (use brackets)");
      }
    }
    pos_ += symbol.size();
    auto info = find_element(symbol);
    atom.element = symbol;
    atom.atomic_number = info->atomic_number;
    add_atom(std::move(atom), 0);
  }

  void bracket_atom(std::size_t end) {
    const std::size_t start = pos_;
    std::size_t close = text_.find(']', pos_);
    if (close == std::string_view::npos || close >= end) {
      throw SmilesError(SmilesErrorKind::Syntax, start, "unterminated bracket atom");
    }
    std::size_t p = pos_ + 1;
    Atom atom;
    atom.offset = start;
    atom.bracket = true;

    auto digit = [&](std::size_t i) { return i < close && std::isdigit(static_cast<unsigned char>(text_[i])); };
    if (digit(p)) {
      int iso = 0;
      while (digit(p)) iso = iso * 10 + (text_[p++] - '0');
      atom.isotope = iso;
    }

    if (p >= close) throw SmilesError(SmilesErrorKind::Syntax, p, "missing element symbol");
    const char c = text_[p];
    if (c == '*') throw SmilesError(SmilesErrorKind::Unsupported, p, "wildcard atoms are not supported");
    std::string symbol;
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (p + 1 < close && std::islower(static_cast<unsigned char>(text_[p + 1])) &&
          find_element(std::string{c, text_[p + 1]})) {
        symbol = std::string{c, text_[p + 1]};
      } else {
        symbol = std::string(1, c);
      }
      if (!find_element(symbol)) {
        throw SmilesError(SmilesErrorKind::UnknownElement, p, "unknown element '" + symbol + "'");
      }
      p += symbol.size();
    } else if (std::islower(static_cast<unsigned char>(c))) {
      static constexpr std::string_view kTwo[] = {"se", "as", "te"};
      bool matched = false;
      for (auto two : kTwo) {
        if (text_.substr(p, 2) == two) {
          symbol = std::string{static_cast<char>(std::toupper(static_cast<unsigned char>(two[0]))), two[1]};
          p += 2;
          matched = true;
          break;
        }
      }
      if (!matched) {
        switch (c) {
          case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
            symbol = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
            ++p;
            break;
          default:
            throw SmilesError(SmilesErrorKind::UnknownElement, p,
                              std::string("'") + c + "' is not an aromatic element");
        }
      }
      atom.aromatic = true;
    } else {
      throw SmilesError(SmilesErrorKind::Syntax, p, "expected element symbol");
    }
    atom.element = symbol;
    atom.atomic_number = find_element(symbol)->atomic_number;

    if (p < close && text_[p] == '@') {
      if (p + 1 < close && text_[p + 1] == '@') {
        atom.chirality = Chirality::Clockwise;
        p += 2;
      } else {
        atom.chirality = Chirality::CounterClockwise;
        ++p;
      }
      if (p < close && std::isupper(static_cast<unsigned char>(text_[p])) && text_[p] != 'H') {
        throw SmilesError(SmilesErrorKind::Unsupported, p, "extended chirality classes are not supported");
      }
    }

    int hydrogens = 0;
    if (p < close && text_[p] == 'H') {
      ++p;
      hydrogens = 1;
      if (digit(p)) {
        hydrogens = 0;
        while (digit(p)) hydrogens = hydrogens * 10 + (text_[p++] - '0');
      }
    }
    atom.explicit_h = hydrogens;

    if (p < close && (text_[p] == '+' || text_[p] == '-')) {
      const char sign = text_[p];
      const std::size_t charge_at = p;
      int magnitude = 1;
      ++p;
      if (digit(p)) {
        magnitude = 0;
        while (digit(p)) magnitude = magnitude * 10 + (text_[p++] - '0');
      } else {
        while (p < close && text_[p] == sign) {
          ++magnitude;
          ++p;
        }
      }
      if (magnitude > 4) throw SmilesError(SmilesErrorKind::Syntax, charge_at, "formal charge out of range");
      atom.formal_charge = sign == '+' ? magnitude : -magnitude;
    }

    if (p < close && text_[p] == ':') {
      ++p;
      if (!digit(p)) throw SmilesError(SmilesErrorKind::Syntax, p, "atom class requires digits");
      while (digit(p)) ++p;
    }
    if (p != close) throw SmilesError(SmilesErrorKind::Syntax, p, "unexpected character in bracket atom");
    pos_ = close + 1;
    add_atom(std::move(atom), hydrogens);
  }

  void add_atom(Atom atom, int bracket_h) {
    const int idx = static_cast<int>(atoms_.size());
    atom.index = idx;
    atoms_.push_back(std::move(atom));
    order_.emplace_back();
    if (prev_ >= 0) {
      Bond b;
      b.a = prev_;
      b.b = idx;
      bool implicit = false;
      if (pending_.is_set) {
        b.order = pending_.order;
        b.direction = pending_.direction;
      } else {
        implicit = true;
        b.order = default_order(prev_, idx);
      }
      add_bond(b, implicit);
      order_[static_cast<std::size_t>(prev_)].push_back(idx);
      order_.back().push_back(prev_);
    } else if (pending_.is_set) {
      throw SmilesError(SmilesErrorKind::Syntax, pending_.offset, "bond without a preceding atom");
    }
    if (bracket_h > 0) order_.back().push_back(kImplicitHydrogenRef);
    pending_ = {};
    prev_ = idx;
    last_was_open_ = false;
  }

  // Derives cis/trans on double bonds from the directional marks around them.
  void assign_double_bond_stereo(std::vector<Bond>& bonds) const {
    auto sign_at = [&](int center, int other_end, bool center_is_first) -> int {
      for (const auto& b : bonds) {
        if (b.direction == BondDirection::None) continue;
        int nb;
        if (b.a == center) {
          nb = b.b;
        } else if (b.b == center) {
          nb = b.a;
        } else {
          continue;
        }
        if (nb == other_end) continue;
        // Direction as read toward the double bond on the first atom and
        // away from it on the second.
        int s = b.direction == BondDirection::Up ? 1 : -1;
        const bool read_toward_center = (b.b == center);
        if (center_is_first != read_toward_center) s = -s;
        return s;
      }
      return 0;
    };
    for (auto& b : bonds) {
      if (b.order != BondOrder::Double) continue;
      int first = std::min(b.a, b.b);
      int second = std::max(b.a, b.b);
      int s1 = sign_at(first, second, true);
      int s2 = sign_at(second, first, false);
      if (s1 == 0 || s2 == 0) continue;
      b.stereo = s1 == s2 ? BondStereo::Trans : BondStereo::Cis;
    }
  }

  MoleculeGraph finish() {
    assign_double_bond_stereo(bonds_);
    MoleculeGraph graph(atoms_, bonds_, order_);
    // Implied aromatic bonds outside rings (e.g. biaryl links) are single.
    bool demoted = false;
    for (std::size_t e = 0; e < bonds_.size(); ++e) {
      if (implicit_bond_[e] && bonds_[e].order == BondOrder::Aromatic && !graph.bond_in_ring(static_cast<int>(e))) {
        bonds_[e].order = BondOrder::Single;
        demoted = true;
      }
    }
    if (!demoted) return graph;
    return MoleculeGraph(std::move(atoms_), std::move(bonds_), std::move(order_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int prev_ = -1;
  bool last_was_open_ = false;
  PendingBond pending_;
  std::vector<std::pair<int, std::size_t>> branches_;
  std::map<int, OpenRing> rings_;
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::uint8_t> implicit_bond_;
  std::vector<std::vector<int>> order_;
};

}  // namespace

MoleculeGraph parse_smiles(std::string_view text) { return SmilesReader(text).read(); }

}  // namespace chemreward
