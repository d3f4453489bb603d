#include "chemreward/reward.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "chemreward/resources.hpp"
#include "chemreward/text.hpp"

namespace chemreward {

namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";

std::size_t count_of(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

struct Hit {
  std::size_t pos;
  std::size_t len;
  std::size_t list;
};

// Phrase hits from several lists, longest match first at each position and
// never overlapping, so "not likely" is one hit rather than "not" + "likely".
std::vector<Hit> scan(std::string_view lower, std::initializer_list<const std::vector<std::string>*> lists) {
  std::vector<Hit> all;
  std::size_t li = 0;
  for (const auto* list : lists) {
    for (const auto& phrase : *list) {
      for (auto pos = text::find_phrase(lower, phrase); pos != std::string_view::npos;
           pos = text::find_phrase(lower, phrase, pos + 1)) {
        all.push_back({pos, phrase.size(), li});
      }
    }
    ++li;
  }
  std::sort(all.begin(), all.end(), [](const Hit& a, const Hit& b) {
    if (a.pos != b.pos) return a.pos < b.pos;
    if (a.len != b.len) return a.len > b.len;
    return a.list < b.list;
  });
  std::vector<Hit> kept;
  std::size_t end = 0;
  for (const auto& h : all) {
    if (!kept.empty() && h.pos < end) continue;
    kept.push_back(h);
    end = h.pos + h.len;
  }
  return kept;
}

bool any_phrase(std::string_view lower, const std::vector<std::string>& phrases) {
  return std::any_of(phrases.begin(), phrases.end(),
                     [&](const std::string& p) { return text::contains_phrase(lower, p); });
}

std::vector<std::string> lower_sentences(std::string_view prose) {
  auto out = text::sentences(prose);
  for (auto& s : out) s = text::lower(s);
  return out;
}

// --- config text -----------------------------------------------------------

struct FieldName {
  ClaimField field;
  std::string_view name;
};
constexpr FieldName kFields[] = {
    {ClaimField::LogP, "logp"},
    {ClaimField::MolWeight, "mol_weight"},
    {ClaimField::Hbd, "hbd"},
    {ClaimField::Hba, "hba"},
    {ClaimField::AromaticRings, "aromatic_rings"},
    {ClaimField::AliphaticRings, "aliphatic_rings"},
    {ClaimField::Stereocenters, "stereocenters"},
    {ClaimField::HeavyAtoms, "heavy_atoms"},
};

struct OpName {
  ClaimOp op;
  std::string_view name;
};
constexpr OpName kOps[] = {
    {ClaimOp::Ge, ">="}, {ClaimOp::Le, "<="}, {ClaimOp::Gt, ">"}, {ClaimOp::Lt, "<"}, {ClaimOp::Eq, "=="},
};

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

class ConfigParser {
 public:
  explicit ConfigParser(std::string_view source) : source_(source) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error("config_error", std::string(source_) + ":" + std::to_string(line_) + ": " + msg);
  }

  double number(std::string_view s) const {
    s = text::trim(s);
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail("expected a number, got '" + std::string(s) + "'");
    }
    return v;
  }

  std::size_t count(std::string_view s) const {
    const double v = number(s);
    if (v < 1 || v != std::floor(v)) fail("expected a positive integer, got '" + std::string(text::trim(s)) + "'");
    return static_cast<std::size_t>(v);
  }

  std::vector<std::string> phrases(std::string_view s) const {
    std::vector<std::string> out;
    for (const auto& p : text::split(s, ',')) {
      if (p.empty()) fail("empty phrase in list");
      out.push_back(text::lower(p));
    }
    return out;
  }

  ClaimRule claim(std::string_view value) const {
    const auto bar = value.find('|');
    if (bar == std::string_view::npos) fail("claim needs 'triggers | predicate'");
    ClaimRule rule;
    rule.triggers = phrases(value.substr(0, bar));
    const auto pred = text::trim(value.substr(bar + 1));
    if (pred == "lipinski") {
      rule.lipinski = true;
      return rule;
    }
    auto parts = text::split(pred, ' ');
    parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
    if (parts.size() != 3) fail("predicate must be '<field> <op> <number>' or 'lipinski'");
    auto f = std::find_if(std::begin(kFields), std::end(kFields), [&](const FieldName& x) { return x.name == parts[0]; });
    if (f == std::end(kFields)) fail("unknown descriptor field '" + parts[0] + "'");
    auto o = std::find_if(std::begin(kOps), std::end(kOps), [&](const OpName& x) { return x.name == parts[1]; });
    if (o == std::end(kOps)) fail("unknown comparison '" + parts[1] + "'");
    rule.field = f->field;
    rule.op = o->op;
    rule.threshold = number(parts[2]);
    return rule;
  }

  void next_line() { ++line_; }

 private:
  std::string_view source_;
  std::size_t line_ = 0;
};

}  // namespace

// --- weights and claims ----------------------------------------------------

void RewardWeights::validate() const {
  for (double v : {lambda1, lambda2, lambda3}) {
    if (!std::isfinite(v) || v < 0) throw Error("invalid_weights", "reward weights must be finite and non-negative");
  }
}

bool ClaimRule::holds(const DescriptorReport& r) const {
  if (lipinski) return lipinski_report(r).pass();
  double v = 0;
  switch (field) {
    case ClaimField::LogP: v = r.logp; break;
    case ClaimField::MolWeight: v = r.mol_weight; break;
    case ClaimField::Hbd: v = r.hbd; break;
    case ClaimField::Hba: v = r.hba; break;
    case ClaimField::AromaticRings: v = r.aromatic_rings; break;
    case ClaimField::AliphaticRings: v = r.aliphatic_rings; break;
    case ClaimField::Stereocenters: v = r.stereocenters; break;
    case ClaimField::HeavyAtoms: v = r.heavy_atoms; break;
  }
  switch (op) {
    case ClaimOp::Ge: return v >= threshold;
    case ClaimOp::Le: return v <= threshold;
    case ClaimOp::Gt: return v > threshold;
    case ClaimOp::Lt: return v < threshold;
    case ClaimOp::Eq: return v == threshold;
  }
  return false;
}

// --- config ----------------------------------------------------------------

RewardConfig RewardConfig::parse(std::string_view text_in, std::string_view source) {
  RewardConfig cfg;
  ConfigParser p(source);
  const auto universe = feature_universe(builtin_library());
  bool have_lambda[3] = {false, false, false};

  std::size_t start = 0;
  while (start <= text_in.size()) {
    auto end = text_in.find('\n', start);
    if (end == std::string_view::npos) end = text_in.size();
    const auto line = text::trim(text_in.substr(start, end - start));
    start = end + 1;
    p.next_line();
    if (line.empty() || line.front() == '#') continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) p.fail("expected 'key = value'");
    const std::string key(text::trim(line.substr(0, eq)));
    const auto value = text::trim(line.substr(eq + 1));

    if (key == "lambda1" || key == "lambda2" || key == "lambda3") {
      const int i = key.back() - '1';
      if (have_lambda[i]) p.fail("duplicate key '" + key + "'");
      have_lambda[i] = true;
      const double v = p.number(value);
      if (v < 0) p.fail(key + " must be non-negative");
      (i == 0 ? cfg.weights.lambda1 : i == 1 ? cfg.weights.lambda2 : cfg.weights.lambda3) = v;
    } else if (key == "conclusion_sentences") {
      cfg.conclusion_sentences = p.count(value);
    } else if (key == "min_smiles_substring") {
      cfg.min_smiles_substring = p.count(value);
    } else if (key == "affirmative") {
      for (auto& s : p.phrases(value)) cfg.affirmative.push_back(std::move(s));
    } else if (key == "negative") {
      for (auto& s : p.phrases(value)) cfg.negative.push_back(std::move(s));
    } else if (key == "negation") {
      for (auto& s : p.phrases(value)) cfg.negation.push_back(std::move(s));
    } else if (key == "example_phrase") {
      for (auto& s : p.phrases(value)) cfg.example_phrases.push_back(std::move(s));
    } else if (key == "label_word") {
      for (auto& s : p.phrases(value)) cfg.label_words.push_back(std::move(s));
    } else if (key == "claim") {
      cfg.claims.push_back(p.claim(value));
    } else if (key.rfind("synonym.", 0) == 0) {
      const auto name = key.substr(8);
      if (!std::binary_search(universe.begin(), universe.end(), name)) {
        p.fail("'" + name + "' is not a feature name");
      }
      auto& list = cfg.synonyms[name];
      for (auto& s : p.phrases(value)) list.push_back(std::move(s));
    } else {
      p.fail("unknown key '" + key + "'");
    }
  }
  return cfg;
}

RewardConfig RewardConfig::load(const std::string& path) { return parse(text::read_file(path), path); }

const RewardConfig& RewardConfig::builtin() {
  static const RewardConfig cfg = [] {
    auto text = resources::find("reward.conf");
    if (!text) throw Error("config_error", "reward.conf resource missing");
    return parse(*text);
  }();
  return cfg;
}

std::string RewardConfig::dump() const {
  std::string out;
  auto kv = [&](std::string_view k, const std::string& v) {
    out.append(k).append(" = ").append(v).push_back('\n');
  };
  kv("lambda1", format_number(weights.lambda1));
  kv("lambda2", format_number(weights.lambda2));
  kv("lambda3", format_number(weights.lambda3));
  kv("conclusion_sentences", std::to_string(conclusion_sentences));
  kv("min_smiles_substring", std::to_string(min_smiles_substring));
  kv("affirmative", join(affirmative));
  kv("negative", join(negative));
  kv("negation", join(negation));
  kv("example_phrase", join(example_phrases));
  kv("label_word", join(label_words));
  for (const auto& c : claims) {
    std::string pred = "lipinski";
    if (!c.lipinski) {
      auto f = std::find_if(std::begin(kFields), std::end(kFields), [&](const FieldName& x) { return x.field == c.field; });
      auto o = std::find_if(std::begin(kOps), std::end(kOps), [&](const OpName& x) { return x.op == c.op; });
      pred = std::string(f->name) + " " + std::string(o->name) + " " + format_number(c.threshold);
    }
    kv("claim", join(c.triggers) + " | " + pred);
  }
  for (const auto& [name, list] : synonyms) kv("synonym." + name, join(list));
  return out;
}

// --- components ------------------------------------------------------------

ParsedResponse parse_response(std::string_view text) {
  ParsedResponse out;
  const auto t_open = text.find(kThinkOpen);
  const auto t_close = t_open == std::string_view::npos ? t_open : text.find(kThinkClose, t_open);
  if (t_close != std::string_view::npos) {
    out.think = std::string(text.substr(t_open + kThinkOpen.size(), t_close - t_open - kThinkOpen.size()));
  }
  const auto a_open = text.find(kAnswerOpen);
  const auto a_close = a_open == std::string_view::npos ? a_open : text.find(kAnswerClose, a_open);
  if (a_close != std::string_view::npos) {
    const auto body = text::trim(text.substr(a_open + kAnswerOpen.size(), a_close - a_open - kAnswerOpen.size()));
    if (text::iequals(body, "true")) out.answer = true;
    if (text::iequals(body, "false")) out.answer = false;
  }
  out.format_ok = out.answer.has_value() && t_close != std::string_view::npos &&
                  count_of(text, kThinkOpen) == 1 && count_of(text, kThinkClose) == 1 &&
                  count_of(text, kAnswerOpen) == 1 && count_of(text, kAnswerClose) == 1 && t_close < a_open &&
                  text::trim(text.substr(a_close + kAnswerClose.size())).empty();
  return out;
}

double answer_reward(const ParsedResponse& parsed, bool label) {
  return parsed.answer.has_value() && *parsed.answer == label ? 1.0 : 0.0;
}

double format_reward(std::string_view text) { return parse_response(text).format_ok ? 1.0 : 0.0; }

double consistency_reward(std::string_view think, std::optional<bool> answer, const RewardConfig& config) {
  if (!answer) return 0.0;
  const auto all = text::sentences(think);
  const auto first = all.size() > config.conclusion_sentences ? all.size() - config.conclusion_sentences : 0;
  std::string window;
  for (std::size_t i = first; i < all.size(); ++i) window += text::lower(all[i]) + " ";

  std::size_t aff = 0, neg = 0;
  for (const auto& h : scan(window, {&config.affirmative, &config.negative})) (h.list == 0 ? aff : neg)++;
  if (aff == 0 && neg == 0) return 0.0;
  return (aff > neg) == *answer ? 1.0 : 0.0;
}

double comparative_reward(std::string_view think, const std::vector<FewShotExample>& fewshot,
                          const RewardConfig& config) {
  if (fewshot.empty()) return 0.0;
  const auto n = config.min_smiles_substring;
  for (const auto& ex : fewshot) {
    for (std::size_t i = 0; i + n <= ex.smiles.size(); ++i) {
      if (think.find(std::string_view(ex.smiles).substr(i, n)) != std::string_view::npos) return 1.0;
    }
  }
  for (const auto& s : lower_sentences(think)) {
    if (any_phrase(s, config.example_phrases) && any_phrase(s, config.label_words)) return 1.0;
  }
  return 0.0;
}

double principle_reward(std::string_view think, const DescriptorReport& report, const RewardConfig& config) {
  // A claim is a (rule, polarity) pair; repeating it does not add weight.
  std::set<std::pair<std::size_t, bool>> claims;
  for (const auto& s : lower_sentences(think)) {
    for (std::size_t r = 0; r < config.claims.size(); ++r) {
      const auto& rule = config.claims[r];
      if (!any_phrase(s, rule.triggers)) continue;
      bool positive = true;
      if (rule.lipinski) positive = scan(s, {&config.negation}).size() % 2 == 0;
      claims.insert({r, positive});
    }
  }
  if (claims.empty()) return 0.0;
  std::size_t verified = 0;
  for (const auto& [r, positive] : claims) {
    if (config.claims[r].holds(report) == positive) ++verified;
  }
  return static_cast<double>(verified) / static_cast<double>(claims.size());
}

std::vector<std::string> mentioned_features(std::string_view think, const RewardConfig& config) {
  static const auto universe = feature_universe(builtin_library());
  const auto lower = text::lower(think);
  std::vector<std::string> out;
  for (const auto& [name, phrases] : config.synonyms) {
    if (!std::binary_search(universe.begin(), universe.end(), name)) continue;
    if (any_phrase(lower, phrases)) out.push_back(name);
  }
  return out;
}

double structure_reward(std::string_view think, const FeatureSet& s_actual, const RewardConfig& config) {
  if (s_actual.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& name : mentioned_features(think, config)) {
    if (s_actual.contains(name)) ++hit;
  }
  return static_cast<double>(hit) / (static_cast<double>(s_actual.size()) + kStructureEpsilon);
}

RewardBreakdown total_reward(const RewardRequest& request, const RewardConfig& config) {
  const auto weights = request.weights.value_or(config.weights);
  weights.validate();
  const auto graph = parse_smiles(request.molecule);
  const auto report = descriptor_report(graph);
  const auto features = extract_features(graph, builtin_library());
  const auto parsed = parse_response(request.response_text);

  RewardBreakdown b;
  b.answer = parsed.answer;
  b.format_ok = parsed.format_ok;
  b.r_ans = answer_reward(parsed, request.label);
  b.r_fmt = parsed.format_ok ? 1.0 : 0.0;
  b.r_cons = consistency_reward(parsed.think, parsed.answer, config);
  b.r_comp = comparative_reward(parsed.think, request.fewshot, config);
  b.r_prin = principle_reward(parsed.think, report, config);
  b.r_struct = structure_reward(parsed.think, features, config);
  b.r_total = combine_reward(weights, b.r_ans, b.r_fmt, b.r_cons, b.r_comp, b.r_prin, b.r_struct);
  return b;
}

}  // namespace chemreward
