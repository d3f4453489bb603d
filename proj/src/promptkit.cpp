#include "chemreward/promptkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <numbers>

#include "chemreward/resources.hpp"
#include "chemreward/text.hpp"

namespace chemreward {

namespace {

constexpr std::string_view kArrow = " \xE2\x86\x92 ";  // " → "
constexpr std::string_view kImagePrefix = "<image: ";

const std::vector<std::string_view>& section_names() {
  static const std::vector<std::string_view> names = {"[Role]", "[Task]", "[Formatting]",
                                                      "[Example]", "[Few-shot]", "[Molecule]"};
  return names;
}

}  // namespace

std::string build_prompt(const PromptSpec& spec) {
  if (spec.formatting_text.find("<think>") == std::string::npos ||
      spec.formatting_text.find("<answer>") == std::string::npos) {
    throw Error("invalid_prompt", "formatting text must mention both <think> and <answer>");
  }
  std::string out;
  auto section = [&](std::string_view name, std::string_view body) {
    if (!out.empty()) out += "\n";
    out += name;
    out += "\n";
    out += body;
    out += "\n";
  };
  section("[Role]", spec.role_text);
  section("[Task]", spec.task_text);
  section("[Formatting]", spec.formatting_text);
  section("[Example]", spec.example_text);
  if (!spec.fewshot.empty()) {
    std::string rows;
    for (const auto& ex : spec.fewshot) {
      if (!rows.empty()) rows += "\n";
      rows += ex.smiles;
      rows += kArrow;
      rows += ex.label ? "True" : "False";
    }
    section("[Few-shot]", rows);
  }
  std::string molecule = spec.molecule_smiles;
  if (spec.image_path) {
    molecule += "\n";
    molecule += kImagePrefix;
    molecule += *spec.image_path;
    molecule += ">";
  }
  section("[Molecule]", molecule);
  return out;
}

PromptSpec split_prompt(std::string_view prompt) {
  const auto& names = section_names();
  std::vector<std::pair<std::string, std::string>> sections;
  for (const auto& line : text::split(prompt, '\n', false)) {
    if (std::find(names.begin(), names.end(), line) != names.end()) {
      sections.emplace_back(line, "");
      continue;
    }
    if (sections.empty()) throw Error("prompt_format", "text before the first section header");
    auto& body = sections.back().second;
    body += line;
    body += "\n";
  }
  // Each body ends with its own newline plus the blank separator line.
  for (auto& [name, body] : sections) {
    if (body.size() < 2 || body.compare(body.size() - 2, 2, "\n\n") != 0) {
      throw Error("prompt_format", "malformed section " + name);
    }
    body.erase(body.size() - 2);
  }

  PromptSpec spec;
  std::size_t next = 0;
  auto take = [&](std::string_view name, bool optional) -> std::optional<std::string> {
    if (next < sections.size() && sections[next].first == name) return sections[next++].second;
    if (optional) return std::nullopt;
    throw Error("prompt_format", "missing or out-of-order section " + std::string(name));
  };
  spec.role_text = *take("[Role]", false);
  spec.task_text = *take("[Task]", false);
  spec.formatting_text = *take("[Formatting]", false);
  spec.example_text = *take("[Example]", false);
  if (auto rows = take("[Few-shot]", true)) {
    for (const auto& row : text::split(*rows, '\n', false)) {
      auto pos = row.rfind(kArrow);
      if (pos == std::string::npos) throw Error("prompt_format", "few-shot row without arrow: " + row);
      const auto label = row.substr(pos + kArrow.size());
      if (label != "True" && label != "False") throw Error("prompt_format", "bad few-shot label: " + label);
      spec.fewshot.push_back({row.substr(0, pos), label == "True"});
    }
  }
  auto molecule = *take("[Molecule]", false);
  if (next != sections.size()) throw Error("prompt_format", "unexpected section " + sections[next].first);
  auto lines = text::split(molecule, '\n', false);
  spec.molecule_smiles = lines[0];
  if (lines.size() == 2 && text::starts_with_ci(lines[1], kImagePrefix) && lines[1].back() == '>') {
    spec.image_path = lines[1].substr(kImagePrefix.size(), lines[1].size() - kImagePrefix.size() - 1);
  } else if (lines.size() != 1) {
    throw Error("prompt_format", "unexpected lines in [Molecule]");
  }
  return spec;
}

const TaskCatalog& TaskCatalog::builtin() {
  static const TaskCatalog catalog = [] {
    TaskCatalog c;
    constexpr std::string_view prefix = "tasks/";
    constexpr std::string_view suffix = ".txt";
    for (const auto& r : resources::all()) {
      if (r.name.substr(0, prefix.size()) != prefix) continue;
      auto stem = r.name.substr(prefix.size(), r.name.size() - prefix.size() - suffix.size());
      c.entries_.emplace_back(std::string(stem), std::string(text::trim(r.content)));
    }
    std::sort(c.entries_.begin(), c.entries_.end());
    return c;
  }();
  return catalog;
}

TaskCatalog TaskCatalog::load(const std::string& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) throw Error("io_error", "task catalog directory not found: " + directory);
  TaskCatalog c;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    c.entries_.emplace_back(entry.path().stem().string(),
                            std::string(text::trim(text::read_file(entry.path().string()))));
  }
  std::sort(c.entries_.begin(), c.entries_.end());
  if (c.entries_.empty()) throw Error("io_error", "task catalog is empty: " + directory);
  return c;
}

const std::string& TaskCatalog::text(std::string_view task) const {
  for (const auto& [id, body] : entries_) {
    if (id == task) return body;
  }
  throw Error("unknown_task", "no task description for '" + std::string(task) + "'");
}

bool TaskCatalog::contains(std::string_view task) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == task; });
}

std::vector<std::string> TaskCatalog::tasks() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : entries_) out.push_back(id);
  return out;
}

const char* to_string(JudgeDimension d) noexcept {
  switch (d) {
    case JudgeDimension::LogicalSoundness: return "logical_soundness";
    case JudgeDimension::AccuracyInsight: return "accuracy_insight";
    case JudgeDimension::Conciseness: return "conciseness";
  }
  return "logical_soundness";
}

JudgeDimension parse_judge_dimension(std::string_view name) {
  for (auto d : {JudgeDimension::LogicalSoundness, JudgeDimension::AccuracyInsight, JudgeDimension::Conciseness}) {
    if (name == to_string(d)) return d;
  }
  throw Error("invalid_argument", "unknown judge dimension '" + std::string(name) + "'");
}

namespace {

struct Rubric {
  std::string_view focus;
  std::string_view extra;  // sentence after the opening, may be empty
  std::string_view title;
  std::string_view criteria;
  std::string_view scale;
};

Rubric rubric(JudgeDimension d) {
  switch (d) {
    case JudgeDimension::LogicalSoundness:
      return {"logical soundness",
              " Focus strictly on the logical connections between reasoning steps, not on whether the final answer "
              "is correct.",
              "Logical Soundness",
              "- Do reasoning steps build progressively and refer back to earlier points?\n"
              "- Is each step a reasonable extension of the previous inference?\n"
              "- Is the language coherent, with no contradictions or confusing wording?\n",
              "- 10: Perfect logical structure; steps are crystal-clear and fully justified.\n"
              "- 8-9: Overall logic sound; only minor or negligible leaps/wording issues.\n"
              "- 6-7: Main logic correct, but some jumps, insufficient explanation, or minor conflicts.\n"
              "- 4-5: Noticeable breaks or missing key inferences, yet some coherent logic remains.\n"
              "- 2-3: Most steps lack causality or contradict each other; only sporadic correct parts.\n"
              "- 0-1: Virtually no discernible valid reasoning structure.\n"};
    case JudgeDimension::AccuracyInsight:
      return {"accuracy and insight value", "", "Accuracy & Insight",
              "- Are the concepts, formulas, and facts used accurate and appropriate?\n"
              "- Do the reasoning perspective, decomposition approach, or intermediate conclusions provide "
              "substantive support or fresh insights for domain experts?\n",
              "- 10: All methods and facts are completely correct, offering deep and original insights.\n"
              "- 8-9: Core content is correct, with only minor detail errors or slightly shallower insights.\n"
              "- 6-7: Mostly correct, but with notable secondary errors or average insight depth.\n"
              "- 4-5: Mix of correct and incorrect information; limited insight value.\n"
              "- 2-3: Most methods/facts are wrong or misused, providing almost no insight.\n"
              "- 0-1: Completely incorrect or irrelevant.\n"};
    case JudgeDimension::Conciseness:
      return {"conciseness", "", "Conciseness",
              "- Does the response go straight to the point, avoiding irrelevant or repetitive explanations?\n"
              "- Does it convey the full reasoning with the minimum necessary steps?\n",
              "- 10: Extremely concise, with no redundant or repetitive statements.\n"
              "- 8-9: Generally concise, with only a tiny amount of removable content.\n"
              "- 6-7: Noticeable redundant paragraphs or repeated explanations.\n"
              "- 4-5: Long-winded and repetitive; key information diluted by noise.\n"
              "- 2-3: Large portions are irrelevant or repetitive; core points hard to discern.\n"
              "- 0-1: Almost entirely made up of redundant content.\n"};
  }
  return rubric(JudgeDimension::LogicalSoundness);
}

}  // namespace

std::string build_judge_prompt(const JudgePromptSpec& spec) {
  const auto r = rubric(spec.dimension);
  std::string out;
  out += "You are a professional reasoning-evaluation expert. Your task is to assess the ";
  out += r.focus;
  out += " of a large language model's chain-of-thought when answering a question, and assign an integer score "
         "from 0 to 10.";
  out += r.extra;
  out += "\n\nInput:\n- [Question]: The original question.\n"
         "- [Model Response]: The model's full response, including its chain of thought.\n\n";
  out += "Scoring Dimension (";
  out += r.title;
  out += "):\n";
  out += r.criteria;
  out += "\nScoring Scale (0-10):\n";
  out += r.scale;
  out += "\nYour Task:\nAdhering strictly to the rubric above, you must output only a single integer score from 0 "
         "to 10. Do not provide any additional explanations, text, or justifications.\n\n";
  out += "Question:\n";
  out += spec.question;
  out += "\n\nModel Response:\n";
  out += spec.response;
  out += "\n\nOutput Format: [integer score]\n";
  return out;
}

// ---------------------------------------------------------------- depiction

namespace {

struct Vec {
  double x = 0.0;
  double y = 0.0;
};

Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y}; }
Vec operator-(Vec a, Vec b) { return {a.x - b.x, a.y - b.y}; }
Vec operator*(Vec a, double s) { return {a.x * s, a.y * s}; }
double norm(Vec a) { return std::hypot(a.x, a.y); }
Vec unit(Vec a) {
  const double n = norm(a);
  return n == 0.0 ? Vec{1.0, 0.0} : a * (1.0 / n);
}
Vec rotate(Vec a, double radians) {
  const double c = std::cos(radians), s = std::sin(radians);
  return {a.x * c - a.y * s, a.x * s + a.y * c};
}
Vec polar(double radius, double angle) { return {radius * std::cos(angle), radius * std::sin(angle)}; }

class Layout {
 public:
  explicit Layout(const MoleculeGraph& g)
      : g_(g),
        pos_(g.atom_count()),
        placed_(g.atom_count(), 0),
        zig_(g.atom_count(), 1),
        ring_done_(g.rings().size(), 0),
        atom_rings_(g.atom_count()) {
    for (std::size_t r = 0; r < g.rings().size(); ++r) {
      for (int a : g.rings()[r]) atom_rings_[static_cast<std::size_t>(a)].push_back(r);
    }
  }

  std::vector<Vec> run() {
    double offset_x = 0.0;
    for (std::size_t start = 0; start < g_.atom_count(); ++start) {
      if (placed_[start]) continue;
      const std::size_t first_new = order_.size();
      place_atom(static_cast<int>(start), {0.0, 0.0}, std::nullopt);
      grow();
      // Shift the fragment right of everything drawn so far.
      double min_x = 1e300, max_x = -1e300;
      for (std::size_t k = first_new; k < order_.size(); ++k) {
        min_x = std::min(min_x, pos_[static_cast<std::size_t>(order_[k])].x);
        max_x = std::max(max_x, pos_[static_cast<std::size_t>(order_[k])].x);
      }
      const double shift = offset_x - min_x;
      for (std::size_t k = first_new; k < order_.size(); ++k) pos_[static_cast<std::size_t>(order_[k])].x += shift;
      offset_x += (max_x - min_x) + 1.5 * kDepictBondLength;
    }
    return pos_;
  }

 private:
  void mark(int atom, Vec p) {
    pos_[static_cast<std::size_t>(atom)] = p;
    placed_[static_cast<std::size_t>(atom)] = 1;
    order_.push_back(atom);
    queue_.push_back(atom);
  }

  // Places `atom` at p; `from` is the direction of the bond we arrived on.
  void place_atom(int atom, Vec p, std::optional<Vec> from) {
    mark(atom, p);
    for (std::size_t r : atom_rings_[static_cast<std::size_t>(atom)]) {
      if (!ring_done_[r]) place_ring_through(r, atom, from ? *from : Vec{1.0, 0.0});
    }
  }

  // Regular polygon containing the placed atom, centered along `dir`.
  void place_ring_through(std::size_t r, int anchor, Vec dir) {
    const auto& ring = g_.rings()[r];
    const auto n = ring.size();
    const double radius = kDepictBondLength / (2.0 * std::sin(std::numbers::pi / static_cast<double>(n)));
    const Vec center = pos_[static_cast<std::size_t>(anchor)] + unit(dir) * radius;
    const auto i0 = static_cast<std::size_t>(std::find(ring.begin(), ring.end(), anchor) - ring.begin());
    const Vec rel = pos_[static_cast<std::size_t>(anchor)] - center;
    const double theta0 = std::atan2(rel.y, rel.x);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    finish_ring(r, center, radius, i0, theta0, step);
  }

  void finish_ring(std::size_t r, Vec center, double radius, std::size_t i0, double theta0, double step) {
    ring_done_[r] = 1;
    centers_.push_back(center);
    const auto& ring = g_.rings()[r];
    const auto n = ring.size();
    for (std::size_t k = 1; k < n; ++k) {
      const int atom = ring[(i0 + k) % n];
      if (placed_[static_cast<std::size_t>(atom)]) continue;
      mark(atom, center + polar(radius, theta0 + static_cast<double>(k) * step));
    }
    // Rings fused to this one, or sharing a single atom.
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t other : atom_rings_[static_cast<std::size_t>(ring[k])]) {
        if (!ring_done_[other]) place_attached_ring(other);
      }
    }
  }

  void place_attached_ring(std::size_t r) {
    const auto& ring = g_.rings()[r];
    const auto n = ring.size();
    // Prefer a placed edge (fusion); otherwise a single placed atom (spiro).
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const int a = ring[i], b = ring[j];
      if (!placed_[static_cast<std::size_t>(a)] || !placed_[static_cast<std::size_t>(b)]) continue;
      const Vec pa = pos_[static_cast<std::size_t>(a)], pb = pos_[static_cast<std::size_t>(b)];
      const Vec mid = (pa + pb) * 0.5;
      const Vec normal = unit(rotate(pb - pa, std::numbers::pi / 2));
      const double apothem = kDepictBondLength / (2.0 * std::tan(std::numbers::pi / static_cast<double>(n)));
      const double radius = kDepictBondLength / (2.0 * std::sin(std::numbers::pi / static_cast<double>(n)));
      // Open the new ring on the side with fewer drawn ring centers nearby.
      const Vec c1 = mid + normal * apothem, c2 = mid - normal * apothem;
      double d1 = 1e300, d2 = 1e300;
      for (const Vec& c : centers_) {
        d1 = std::min(d1, norm(c - c1));
        d2 = std::min(d2, norm(c - c2));
      }
      const Vec center = d1 >= d2 ? c1 : c2;
      const double ta = std::atan2(pa.y - center.y, pa.x - center.x);
      const double tb = std::atan2(pb.y - center.y, pb.x - center.x);
      double delta = std::remainder(tb - ta, 2.0 * std::numbers::pi);
      const double step = (delta >= 0 ? 1.0 : -1.0) * 2.0 * std::numbers::pi / static_cast<double>(n);
      finish_ring(r, center, radius, i, ta, step);
      return;
    }
    for (int a : ring) {
      if (!placed_[static_cast<std::size_t>(a)]) continue;
      Vec out{1.0, 0.0};
      for (std::size_t other : atom_rings_[static_cast<std::size_t>(a)]) {
        if (ring_done_[other]) out = pos_[static_cast<std::size_t>(a)] - ring_center(other);
      }
      place_ring_through(r, a, out);
      return;
    }
  }

  Vec ring_center(std::size_t r) const {
    Vec sum;
    for (int a : g_.rings()[r]) sum = sum + pos_[static_cast<std::size_t>(a)];
    return sum * (1.0 / static_cast<double>(g_.rings()[r].size()));
  }

  // Breadth-first placement of chain substituents.
  void grow() {
    while (!queue_.empty()) {
      const int u = queue_.front();
      queue_.pop_front();
      std::vector<int> pending;
      std::vector<Vec> used;
      for (const auto& nb : g_.neighbors(u)) {
        if (placed_[static_cast<std::size_t>(nb.atom)]) {
          used.push_back(unit(pos_[static_cast<std::size_t>(nb.atom)] - pos_[static_cast<std::size_t>(u)]));
        } else {
          pending.push_back(nb.atom);
        }
      }
      if (pending.empty()) continue;
      const Vec pu = pos_[static_cast<std::size_t>(u)];
      std::vector<Vec> dirs;
      const auto& rings = atom_rings_[static_cast<std::size_t>(u)];
      if (!rings.empty()) {
        // Away from the ring(s), fanned if more than one.
        Vec out;
        for (std::size_t r : rings) out = out + unit(pu - ring_center(r));
        out = unit(out);
        const double spread = std::numbers::pi / 3;
        for (std::size_t k = 0; k < pending.size(); ++k) {
          const double off = (static_cast<double>(k) - static_cast<double>(pending.size() - 1) / 2.0) * spread;
          dirs.push_back(rotate(out, off));
        }
      } else if (used.empty()) {
        const double step = 2.0 * std::numbers::pi / static_cast<double>(pending.size());
        for (std::size_t k = 0; k < pending.size(); ++k) {
          dirs.push_back(rotate(Vec{std::cos(-std::numbers::pi / 6), std::sin(-std::numbers::pi / 6)},
                                step * static_cast<double>(k)));
        }
      } else if (used.size() == 1 && pending.size() == 1) {
        const Vec back = used[0];
        const double sign = static_cast<double>(zig_[static_cast<std::size_t>(u)]);
        dirs.push_back(rotate(back, sign * 2.0 * std::numbers::pi / 3));
      } else {
        // Spread the free neighbors through the largest empty sector.
        std::vector<double> angles;
        for (const Vec& v : used) angles.push_back(std::atan2(v.y, v.x));
        std::sort(angles.begin(), angles.end());
        double best_start = angles.back(), best_gap = 2.0 * std::numbers::pi - (angles.back() - angles.front());
        for (std::size_t k = 1; k < angles.size(); ++k) {
          if (angles[k] - angles[k - 1] > best_gap) {
            best_gap = angles[k] - angles[k - 1];
            best_start = angles[k - 1];
          }
        }
        if (angles.size() == 1) best_gap = 2.0 * std::numbers::pi;
        const double step = best_gap / static_cast<double>(pending.size() + 1);
        for (std::size_t k = 0; k < pending.size(); ++k) {
          const double a = best_start + step * static_cast<double>(k + 1);
          dirs.push_back({std::cos(a), std::sin(a)});
        }
      }
      for (std::size_t k = 0; k < pending.size(); ++k) {
        const int v = pending[k];
        if (placed_[static_cast<std::size_t>(v)]) continue;  // closed by a ring placed meanwhile
        zig_[static_cast<std::size_t>(v)] = -zig_[static_cast<std::size_t>(u)];
        place_atom(v, pu + dirs[k] * kDepictBondLength, dirs[k]);
      }
    }
  }

  const MoleculeGraph& g_;
  std::vector<Vec> pos_;
  std::vector<std::uint8_t> placed_;
  std::vector<int> zig_;
  std::vector<std::uint8_t> ring_done_;
  std::vector<std::vector<std::size_t>> atom_rings_;
  std::vector<Vec> centers_;
  std::vector<int> order_;
  std::deque<int> queue_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8f", v);
  std::string s(buf);
  if (s == "-0.00000000") s = "0.00000000";
  return s;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string atom_label(const MoleculeGraph& g, int i) {
  const Atom& a = g.atom(i);
  std::string label = a.element;
  const int h = g.total_h(i);
  if (h > 0) label += "H";
  if (h > 1) label += std::to_string(h);
  if (a.formal_charge != 0) {
    const int q = std::abs(a.formal_charge);
    if (q > 1) label += std::to_string(q);
    label += a.formal_charge > 0 ? "+" : "-";
  }
  return label;
}

}  // namespace

std::string depict_svg(const MoleculeGraph& graph) {
  auto pos = Layout(graph).run();
  constexpr double margin = 20.0;
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (i == 0) {
      min_x = max_x = pos[i].x;
      min_y = max_y = pos[i].y;
    }
    min_x = std::min(min_x, pos[i].x);
    max_x = std::max(max_x, pos[i].x);
    min_y = std::min(min_y, pos[i].y);
    max_y = std::max(max_y, pos[i].y);
  }
  for (auto& p : pos) p = {p.x - min_x + margin, p.y - min_y + margin};
  const double width = max_x - min_x + 2 * margin;
  const double height = max_y - min_y + 2 * margin;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(width) + "\" height=\"" +
         fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<g stroke=\"black\" stroke-width=\"1.5\" stroke-linecap=\"round\">\n";
  auto line = [&](Vec a, Vec b, bool dashed) {
    svg += "  <line x1=\"" + fmt(a.x) + "\" y1=\"" + fmt(a.y) + "\" x2=\"" + fmt(b.x) + "\" y2=\"" + fmt(b.y) + "\"";
    if (dashed) svg += " stroke-dasharray=\"4,3\"";
    svg += "/>\n";
  };
  for (std::size_t bi = 0; bi < graph.bond_count(); ++bi) {
    const Bond& b = graph.bond(static_cast<int>(bi));
    const Vec pa = pos[static_cast<std::size_t>(b.a)], pb = pos[static_cast<std::size_t>(b.b)];
    svg += " <g class=\"bond\" data-a=\"" + std::to_string(b.a) + "\" data-b=\"" + std::to_string(b.b) +
           "\" data-order=\"" + std::to_string(static_cast<int>(b.order)) + "\">\n";
    const Vec off = unit(rotate(pb - pa, std::numbers::pi / 2)) * 4.0;
    switch (b.order) {
      case BondOrder::Single: line(pa, pb, false); break;
      case BondOrder::Double:
        line(pa + off * 0.5, pb + off * 0.5, false);
        line(pa - off * 0.5, pb - off * 0.5, false);
        break;
      case BondOrder::Triple:
        line(pa, pb, false);
        line(pa + off, pb + off, false);
        line(pa - off, pb - off, false);
        break;
      case BondOrder::Aromatic:
        line(pa, pb, false);
        line(pa + off, pb + off, true);
        break;
    }
    svg += " </g>\n";
  }
  svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" dominant-baseline=\"central\">\n";
  for (std::size_t i = 0; i < graph.atom_count(); ++i) {
    const int ai = static_cast<int>(i);
    const Atom& a = graph.atom(ai);
    const std::string common = "class=\"atom\" data-index=\"" + std::to_string(i) + "\" data-element=\"" +
                               xml_escape(a.element) + "\" data-x=\"" + fmt(pos[i].x) + "\" data-y=\"" +
                               fmt(pos[i].y) + "\"";
    const bool plain_carbon = a.atomic_number == 6 && a.formal_charge == 0 && !a.isotope && graph.degree(ai) > 0;
    if (plain_carbon) {
      svg += " <circle " + common + " cx=\"" + fmt(pos[i].x) + "\" cy=\"" + fmt(pos[i].y) +
             "\" r=\"0\" fill=\"none\"/>\n";
    } else {
      svg += " <text " + common + " x=\"" + fmt(pos[i].x) + "\" y=\"" + fmt(pos[i].y) + "\" stroke=\"white\" "
             "stroke-width=\"6\" paint-order=\"stroke\">" + xml_escape(atom_label(graph, ai)) + "</text>\n";
    }
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace chemreward
