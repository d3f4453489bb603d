#include "chemreward/patterns.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <set>

#include "chemreward/elements.hpp"
#include "chemreward/resources.hpp"
#include "chemreward/text.hpp"

namespace chemreward {

const char* to_string(FeatureCategory c) noexcept {
  switch (c) {
    case FeatureCategory::FunctionalGroup: return "functional_group";
    case FeatureCategory::RingSystem: return "ring_system";
    case FeatureCategory::Stereo: return "stereo";
  }
  return "functional_group";
}

bool AtomPattern::accepts(const MoleculeGraph& graph, int atom) const {
  const Atom& a = graph.atom(atom);
  if (!elements.empty() && std::find(elements.begin(), elements.end(), a.element) == elements.end()) return false;
  if (aromatic && *aromatic != a.aromatic) return false;
  if (charge && *charge != a.formal_charge) return false;
  if (min_degree && graph.degree(atom) < *min_degree) return false;
  if (max_degree && graph.degree(atom) > *max_degree) return false;
  if (attached_h && graph.total_h(atom) != *attached_h) return false;
  return true;
}

bool accepts(BondConstraint constraint, BondOrder order) noexcept {
  switch (constraint) {
    case BondConstraint::Single: return order == BondOrder::Single;
    case BondConstraint::Double: return order == BondOrder::Double;
    case BondConstraint::Triple: return order == BondOrder::Triple;
    case BondConstraint::Aromatic: return order == BondOrder::Aromatic;
    case BondConstraint::Any: return true;
  }
  return false;
}

const SubstructurePattern* FeatureLibrary::find(std::string_view name) const {
  for (const auto& p : patterns) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void FeatureSet::add(const std::string& name, int count) {
  if (count <= 0) return;
  counts_[name] += count;
}

int FeatureSet::count(std::string_view name) const {
  auto it = counts_.find(std::string(name));
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::string> FeatureSet::names() const {
  std::vector<std::string> out;
  out.reserve(counts_.size());
  for (const auto& [name, _] : counts_) out.push_back(name);
  return out;
}

namespace {

class Matcher {
 public:
  Matcher(const SubstructurePattern& p, const MoleculeGraph& g) : p_(p), g_(g) {
    const std::size_t k = p.nodes.size();
    adjacency_.resize(k);
    for (const auto& e : p.edges) {
      adjacency_[static_cast<std::size_t>(e.from)].push_back({e.to, e.bond});
      adjacency_[static_cast<std::size_t>(e.to)].push_back({e.from, e.bond});
    }
    // BFS order from node 0 so every later node has a mapped anchor.
    std::vector<std::uint8_t> seen(k, 0);
    anchor_.assign(k, -1);
    std::deque<int> queue{0};
    seen[0] = 1;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      order_.push_back(u);
      for (const auto& [v, _] : adjacency_[static_cast<std::size_t>(u)]) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          anchor_[static_cast<std::size_t>(v)] = u;
          queue.push_back(v);
        }
      }
    }
    map_.assign(k, -1);
    used_.assign(g.atom_count(), 0);
  }

  std::vector<Mapping> run() {
    if (p_.nodes.empty() || p_.nodes.size() > g_.atom_count()) return {};
    extend(0);
    std::vector<Mapping> out;
    out.reserve(found_.size());
    for (auto& [_, m] : found_) out.push_back(std::move(m));
    return out;
  }

 private:
  struct Link {
    int node;
    BondConstraint bond;
  };

  bool consistent(int node, int atom) const {
    if (!p_.nodes[static_cast<std::size_t>(node)].accepts(g_, atom)) return false;
    for (const auto& [other, bond] : adjacency_[static_cast<std::size_t>(node)]) {
      int mapped = map_[static_cast<std::size_t>(other)];
      if (mapped < 0) continue;
      int e = g_.bond_between(atom, mapped);
      if (e < 0 || !accepts(bond, g_.bond(e).order)) return false;
    }
    return true;
  }

  void extend(std::size_t depth) {
    if (depth == order_.size()) {
      std::vector<int> key = map_;
      std::sort(key.begin(), key.end());
      found_.emplace(std::move(key), map_);
      return;
    }
    const int node = order_[depth];
    const int anchor = anchor_[static_cast<std::size_t>(node)];
    auto attempt = [&](int atom) {
      if (used_[static_cast<std::size_t>(atom)] || !consistent(node, atom)) return;
      map_[static_cast<std::size_t>(node)] = atom;
      used_[static_cast<std::size_t>(atom)] = 1;
      extend(depth + 1);
      used_[static_cast<std::size_t>(atom)] = 0;
      map_[static_cast<std::size_t>(node)] = -1;
    };
    if (anchor < 0) {
      for (std::size_t a = 0; a < g_.atom_count(); ++a) attempt(static_cast<int>(a));
    } else {
      for (const auto& nb : g_.neighbors(map_[static_cast<std::size_t>(anchor)])) attempt(nb.atom);
    }
  }

  const SubstructurePattern& p_;
  const MoleculeGraph& g_;
  std::vector<std::vector<Link>> adjacency_;
  std::vector<int> order_;
  std::vector<int> anchor_;
  std::vector<int> map_;
  std::vector<std::uint8_t> used_;
  std::map<std::vector<int>, Mapping> found_;  // first mapping per atom set
};

bool is_heteroatom(const Atom& a) { return a.atomic_number != 6 && a.atomic_number != 1; }

bool covered_by(const Mapping& loser, const Mapping& winner, const MoleculeGraph& g) {
  bool any_hetero = false;
  for (int atom : loser) {
    if (!is_heteroatom(g.atom(atom))) continue;
    any_hetero = true;
    if (std::find(winner.begin(), winner.end(), atom) == winner.end()) return false;
  }
  return any_hetero;
}

}  // namespace

std::vector<Mapping> match(const SubstructurePattern& pattern, const MoleculeGraph& graph) {
  return Matcher(pattern, graph).run();
}

FeatureSet extract_features(const MoleculeGraph& graph, const FeatureLibrary& library) {
  std::map<std::string, std::vector<Mapping>> raw;
  for (const auto& p : library.patterns) raw[p.name] = match(p, graph);

  FeatureSet features;
  for (const auto& [name, mappings] : raw) {
    int kept = 0;
    for (const auto& m : mappings) {
      bool suppressed = false;
      for (const auto& s : library.suppressions) {
        if (std::find(s.losers.begin(), s.losers.end(), name) == s.losers.end()) continue;
        auto it = raw.find(s.winner);
        if (it == raw.end()) continue;
        for (const auto& w : it->second) {
          if (covered_by(m, w, graph)) {
            suppressed = true;
            break;
          }
        }
        if (suppressed) break;
      }
      if (!suppressed) ++kept;
    }
    features.add(name, kept);
  }

  int aromatic = 0;
  int aliphatic = 0;
  for (const auto& ring : graph.rings()) {
    const bool all_aromatic =
        std::all_of(ring.begin(), ring.end(), [&](int a) { return graph.atom(a).aromatic; });
    (all_aromatic ? aromatic : aliphatic)++;
  }
  features.add(std::string(kAromaticRing), aromatic);
  features.add(std::string(kAliphaticRing), aliphatic);

  int fused = 0;
  const auto& rings = graph.rings();
  for (std::size_t i = 0; i < rings.size(); ++i) {
    std::set<int> atoms_i(rings[i].begin(), rings[i].end());
    for (std::size_t j = i + 1; j < rings.size(); ++j) {
      int shared = 0;
      for (int a : rings[j]) shared += atoms_i.count(a) ? 1 : 0;
      if (shared >= 2) ++fused;
    }
  }
  features.add(std::string(kFusedRingSystem), fused);

  int centers = 0;
  for (const auto& a : graph.atoms()) centers += a.chirality != Chirality::None ? 1 : 0;
  features.add(std::string(kStereocenter), centers);
  int db = 0;
  for (const auto& b : graph.bonds()) db += b.stereo != BondStereo::None ? 1 : 0;
  features.add(std::string(kDoubleBondStereo), db);
  return features;
}

namespace {

[[noreturn]] void library_error(std::size_t line, const std::string& msg) {
  throw Error("feature_library_error", "line " + std::to_string(line) + ": " + msg);
}

int parse_int(std::string_view s, std::size_t line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) library_error(line, "bad integer '" + std::string(s) + "'");
  return value;
}

AtomPattern parse_node(std::string_view spec, std::size_t line) {
  AtomPattern node;
  for (const auto& item : text::split(spec, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) library_error(line, "node constraint needs key=value: " + item);
    std::string key(text::trim(std::string_view(item).substr(0, eq)));
    std::string value(text::trim(std::string_view(item).substr(eq + 1)));
    if (key == "el") {
      for (const auto& el : text::split(value, '/')) {
        if (!find_element(el)) library_error(line, "unknown element '" + el + "'");
        node.elements.push_back(el);
      }
    } else if (key == "ar") {
      if (value != "0" && value != "1") library_error(line, "ar must be 0 or 1");
      node.aromatic = value == "1";
    } else if (key == "chg") {
      node.charge = parse_int(value, line);
    } else if (key == "deg") {
      node.min_degree = parse_int(value, line);
    } else if (key == "maxdeg") {
      node.max_degree = parse_int(value, line);
    } else if (key == "h") {
      node.attached_h = parse_int(value, line);
    } else {
      library_error(line, "unknown node constraint '" + key + "'");
    }
  }
  if (!node.has_constraint()) library_error(line, "node without constraints");
  return node;
}

BondConstraint parse_bond(char c, std::size_t line) {
  switch (c) {
    case '-': return BondConstraint::Single;
    case '=': return BondConstraint::Double;
    case '#': return BondConstraint::Triple;
    case ':': return BondConstraint::Aromatic;
    case '~': return BondConstraint::Any;
    default: library_error(line, std::string("unknown bond constraint '") + c + "'");
  }
}

void validate(const SubstructurePattern& p, std::size_t line) {
  const auto k = static_cast<int>(p.nodes.size());
  if (k == 0) library_error(line, "pattern '" + p.name + "' has no nodes");
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(k));
  for (const auto& e : p.edges) {
    if (e.from < 0 || e.to < 0 || e.from >= k || e.to >= k || e.from == e.to) {
      library_error(line, "pattern '" + p.name + "' has an invalid edge");
    }
    adj[static_cast<std::size_t>(e.from)].push_back(e.to);
    adj[static_cast<std::size_t>(e.to)].push_back(e.from);
  }
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(k), 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int reached = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    ++reached;
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        queue.push_back(v);
      }
    }
  }
  if (reached != k) library_error(line, "pattern '" + p.name + "' is not connected");
}

}  // namespace

FeatureLibrary parse_feature_library(std::string_view body) {
  FeatureLibrary lib;
  std::set<std::string> names;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(body, '\n', false)) {
    ++line_no;
    auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = text::split(line, '|');
    if (fields[0] == "pattern") {
      if (fields.size() < 5 || fields.size() > 7) library_error(line_no, "pattern record needs 5-7 fields");
      SubstructurePattern p;
      p.name = fields[1];
      if (p.name.empty()) library_error(line_no, "empty pattern name");
      if (fields[2] == "functional_group") {
        p.category = FeatureCategory::FunctionalGroup;
      } else if (fields[2] == "ring_system") {
        p.category = FeatureCategory::RingSystem;
      } else if (fields[2] == "stereo") {
        p.category = FeatureCategory::Stereo;
      } else {
        library_error(line_no, "unknown category '" + fields[2] + "'");
      }
      for (const auto& node : text::split(fields[3], ';')) p.nodes.push_back(parse_node(node, line_no));
      if (!fields[4].empty()) {
        for (const auto& edge : text::split(fields[4], ';')) {
          auto dash = edge.find('-');
          auto colon = edge.find(':');
          if (dash == std::string::npos || colon == std::string::npos || colon + 2 != edge.size()) {
            library_error(line_no, "edge must look like i-j:<bond>, got '" + edge + "'");
          }
          PatternEdge e;
          e.from = parse_int(std::string_view(edge).substr(0, dash), line_no);
          e.to = parse_int(std::string_view(edge).substr(dash + 1, colon - dash - 1), line_no);
          e.bond = parse_bond(edge.back(), line_no);
          p.edges.push_back(e);
        }
      }
      if (fields.size() > 5) p.exemplar = fields[5];
      if (fields.size() > 6) p.description = fields[6];
      validate(p, line_no);
      if (!names.insert(p.name).second) library_error(line_no, "duplicate pattern name '" + p.name + "'");
      lib.patterns.push_back(std::move(p));
    } else if (fields[0] == "suppress") {
      if (fields.size() != 3) library_error(line_no, "suppress record needs 3 fields");
      Suppression s;
      s.winner = fields[1];
      for (const auto& loser : text::split(fields[2], ' ')) {
        if (!loser.empty()) s.losers.push_back(loser);
      }
      lib.suppressions.push_back(std::move(s));
    } else {
      library_error(line_no, "unknown record type '" + fields[0] + "'");
    }
  }
  for (const auto& s : lib.suppressions) {
    if (!lib.find(s.winner)) throw Error("feature_library_error", "suppress names unknown pattern '" + s.winner + "'");
    for (const auto& l : s.losers) {
      if (!lib.find(l)) throw Error("feature_library_error", "suppress names unknown pattern '" + l + "'");
    }
  }
  if (lib.patterns.empty()) throw Error("feature_library_error", "library has no patterns");
  return lib;
}

FeatureLibrary load_feature_library(const std::string& path) { return parse_feature_library(text::read_file(path)); }

const FeatureLibrary& builtin_library() {
  static const FeatureLibrary lib = parse_feature_library(*resources::find("features.lib"));
  return lib;
}

std::vector<std::string> feature_universe(const FeatureLibrary& library) {
  std::vector<std::string> names;
  for (const auto& p : library.patterns) names.push_back(p.name);
  for (auto s : {kAromaticRing, kAliphaticRing, kFusedRingSystem, kStereocenter, kDoubleBondStereo}) {
    names.emplace_back(s);
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

}  // namespace chemreward
