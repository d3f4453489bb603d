// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Each check carries its own oracle; none of them calls the engine to
// compute the expected value.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "chemreward/descriptors.hpp"
#include "chemreward/engine.hpp"
#include "chemreward/evalmetrics.hpp"
#include "chemreward/grpo.hpp"
#include "chemreward/molgraph.hpp"
#include "chemreward/patterns.hpp"
#include "chemreward/protocol.hpp"
#include "chemreward/retrieval.hpp"
#include "chemreward/reward.hpp"
#include "chemreward/service.hpp"

using namespace chemreward;
using json = nlohmann::json;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string fixture(const std::string& name) { return std::string(CHEMREWARD_FIXTURE_DIR) + "/" + name; }

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() != '#') out.push_back(line);
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string cell; std::getline(ss, cell, sep);) out.push_back(cell);
  return out;
}

// Same fragment grammar as the unit-test helper, kept local so this binary
// stands alone.
std::string random_smiles(std::mt19937_64& rng) {
  static const char* const kFragments[] = {"C", "C", "C", "CC", "N", "O", "c1ccccc1", "C(=O)", "C(C)",
                                           "S", "c1ccncc1", "C(F)", "C1CC1", "C(O)", "C=C", "C#C"};
  constexpr std::size_t kCount = sizeof(kFragments) / sizeof(kFragments[0]);
  while (true) {
    const auto n = 1 + rng() % 7;
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
      std::string frag = kFragments[rng() % kCount];
      for (auto& c : frag) {
        if (c == '1') c = static_cast<char>('1' + i % 9);
      }
      s += frag;
    }
    try {
      parse_smiles(s);
      return s;
    } catch (const Error&) {
    }
  }
}

// ---------------------------------------------------------------------------

Outcome reward_recombination() {
  Outcome o;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0), lam(0.0, 3.0);
  const std::vector<std::string> pieces = {
      "It is lipophilic.", "The molecule is polar.", "It has an aromatic ring.", "It passes the rule of five.",
      "It does not pass the rule of five.", "Like the first example, it is likely active.",
      "It is unlikely to cross.", "A hydroxyl group and an amine are present.", "High molecular weight."};
  const std::vector<std::string> molecules = {"c1ccccc1CCO", "CC(=O)Oc1ccccc1C(=O)O", "CCN(CC)CC", "OCC(O)CO",
                                              "c1ccc2ccccc2c1"};
  // Recombination as the spec states it, written out independently.
  auto recombine = [](const RewardWeights& w, double a, double f, double c, double p, double r, double s) {
    return w.lambda1 * (a + f) + w.lambda2 * (c + p) + w.lambda3 * (r + s);
  };
  const Engine engine{EngineConfig{}};
  for (int i = 0; i < 1000 && o.ok; ++i) {
    // Raw components straight through combine_reward.
    const RewardWeights w{lam(rng), lam(rng), lam(rng)};
    const double c[6] = {unit(rng), unit(rng), unit(rng), unit(rng), unit(rng), unit(rng)};
    o.require(combine_reward(w, c[0], c[1], c[2], c[3], c[4], c[5]) == recombine(w, c[0], c[1], c[2], c[3], c[4], c[5]),
              "combine_reward differs at i=" + std::to_string(i));

    // Full pipeline: r_total in the service response against its own components.
    std::string think;
    for (int k = 0, n = 1 + static_cast<int>(rng() % 4); k < n; ++k) think += pieces[rng() % pieces.size()] + " ";
    const bool say = rng() & 1U;
    const std::string response = "<think>" + think + "</think>\n<answer>" + (say ? "True" : "False") + "</answer>";
    json req = {{"id", i},
                {"smiles", molecules[rng() % molecules.size()]},
                {"label", (rng() & 1U) != 0},
                {"response", response},
                {"fewshot", {{{"smiles", "c1ccccc1CO"}, {"label", true}}, {{"smiles", "CCCC"}, {"label", false}}}},
                {"weights", {{"lambda1", w.lambda1}, {"lambda2", w.lambda2}, {"lambda3", w.lambda3}}}};
    const auto out = json::parse(handle_reward_line(engine, req.dump(), 1));
    if (out.contains("error")) {
      o.require(false, "error response: " + out.dump());
      break;
    }
    const double total = recombine(w, out["r_ans"], out["r_fmt"], out["r_cons"], out["r_comp"], out["r_prin"],
                                   out["r_struct"]);
    o.require(out["r_total"].get<double>() == total, "r_total not bit-exact at i=" + std::to_string(i));
  }
  const RewardWeights defaults = RewardConfig::builtin().weights;
  o.require(defaults == RewardWeights{1.0, 0.25, 0.25}, "default weights are not (1.0, 0.25, 0.25)");
  o.require(combine_reward(defaults, 1, 1, 1, 1, 1, 1) == 3.0, "all-ones total is not 3.0");
  if (o.ok) o.detail = "1000 combinations bit-exact, all-ones = 3.0";
  return o;
}

Outcome structure_formula() {
  Outcome o;
  const auto& config = RewardConfig::builtin();
  const auto universe = feature_universe(builtin_library());
  std::mt19937_64 rng(12);
  std::size_t nonzero = 0;
  for (int i = 0; i < 10000 && o.ok; ++i) {
    std::set<std::string> actual, predicted;
    FeatureSet s_actual;
    for (const auto& f : universe) {
      if (rng() % 4 == 0) {
        actual.insert(f);
        s_actual.add(f);
      }
      if (rng() % 5 == 0) predicted.insert(f);
    }
    std::string think = "Looking at the structure.";
    for (const auto& f : predicted) {
      const auto& phrases = config.synonyms.at(f);
      think += " It contains " + phrases[rng() % phrases.size()] + ".";
    }
    std::vector<std::string> both;
    std::set_intersection(actual.begin(), actual.end(), predicted.begin(), predicted.end(), std::back_inserter(both));
    const double expected = static_cast<double>(both.size()) / (static_cast<double>(actual.size()) + 1e-5);
    const double got = structure_reward(think, s_actual, config);
    nonzero += got > 0;
    o.require(std::abs(got - expected) <= 1e-12,
              "pair " + std::to_string(i) + ": got " + std::to_string(got) + " expected " + std::to_string(expected));
  }
  if (o.ok) o.detail = "10000 pairs within 1e-12 (" + std::to_string(nonzero) + " nonzero)";
  return o;
}

Outcome auc_oracle() {
  Outcome o;
  std::mt19937_64 rng(13);
  std::size_t ties_seen = 0;
  for (int inst = 0; inst < 500 && o.ok; ++inst) {
    const std::size_t n = 2 + rng() % 199;
    const int levels = 1 + static_cast<int>(rng() % 20);  // few levels -> many ties
    std::vector<ScoredPrediction> preds(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds[i].id = std::to_string(i);
      preds[i].score = static_cast<double>(rng() % static_cast<unsigned>(levels)) / levels;
      preds[i].label = (rng() & 1U) != 0;
    }
    preds[0].label = true;
    preds[1].label = false;
    double credit = 0.0;
    std::size_t pos = 0, neg = 0;
    for (const auto& p : preds) (p.label ? pos : neg)++;
    for (const auto& p : preds) {
      if (!p.label) continue;
      for (const auto& q : preds) {
        if (q.label) continue;
        if (p.score > q.score) credit += 1.0;
        if (p.score == q.score) {
          credit += 0.5;
          ++ties_seen;
        }
      }
    }
    const double expected = credit / static_cast<double>(pos * neg);
    o.require(roc_auc(preds) == expected, "instance " + std::to_string(inst) + " differs");
  }
  std::vector<ScoredPrediction> sep = {{"a", 0.9, true}, {"b", 0.8, true}, {"c", 0.1, false}, {"d", 0.2, false}};
  o.require(roc_auc(sep) == 1.0, "perfect separation is not 1.0");
  for (auto& p : sep) p.score = 0.3;
  o.require(roc_auc(sep) == 0.5, "all-tied is not 0.5");
  if (o.ok) o.detail = "500 instances exact (" + std::to_string(ties_seen) + " tied pairs), 1.0 and 0.5 edge cases";
  return o;
}

Outcome table_audit() {
  Outcome o;
  const auto tables = load_published_tables(std::string(CHEMREWARD_DATA_DIR) + "/tables");
  const auto report = audit_tables(tables);
  // Half-up rounding to the printed precision.
  auto reproduces = [&](const char* table, const char* row, const char* col, double published, int decimals) {
    const auto* f = report.find(table, row, col);
    if (!f) {
      o.require(false, std::string("no finding for ") + table + "/" + row + "/" + col);
      return;
    }
    const double scale = std::pow(10.0, decimals);
    const bool rounds = std::abs(f->recomputed * scale - published * scale) <= 0.5 + 1e-9;
    o.require(rounds && !f->mismatch && f->published == published,
              std::string(table) + "/" + row + "/" + col + " recomputed " + std::to_string(f->recomputed));
  };
  reproduces("main_results", "proposed", "avg_OOD", 0.7977, 4);
  reproduces("ablation", "sft_only", "avg_ID", 0.7330, 4);
  reproduces("ablation", "sft_only", "avg_OOD", 0.7547, 4);
  reproduces("reasoning_quality", "o3-mini", "average", 6.235, 3);
  reproduces("reasoning_quality", "DeepSeek-V3.1-Think", "average", 6.723, 3);

  const auto* rq = report.find("reasoning_quality", "proposed", "average");
  o.require(rq && rq->mismatch && std::abs(rq->recomputed - 7.649) < 5e-4 && rq->published == 7.730,
            "reasoning_quality/proposed not flagged as 7.649 vs 7.730");
  const auto* bbbp = report.find("main_results", "proposed", "BBBP");
  o.require(bbbp && bbbp->mismatch && bbbp->kind == AuditFinding::Kind::CrossRef && bbbp->published == 0.7436 &&
                bbbp->recomputed == 0.7459,
            "BBBP 0.7436/0.7459 cross-reference not flagged");
  if (o.ok) {
    o.detail = "5 averages reproduce; flagged 7.649 vs 7.730 and BBBP 0.7436/0.7459 (" +
               std::to_string(report.mismatches()) + " mismatches in " + std::to_string(report.findings.size()) +
               " checks)";
  }
  return o;
}

Outcome retrieval_oracle() {
  Outcome o;
  std::mt19937_64 rng(15);
  const char* tasks[] = {"BACE", "BBBP"};
  std::vector<LabeledMolecule> data;
  for (int i = 0; i < 1000; ++i) data.push_back({random_smiles(rng), (rng() & 1U) != 0, tasks[rng() % 2]});
  const auto store = ExampleStore::build(data);
  o.require(store.records().size() == 1000, "store did not keep 1000 records");
  // Parsed once for the oracle's isomorphism exclusion.
  std::vector<MoleculeGraph> graphs;
  for (const auto& r : store.records()) graphs.push_back(parse_smiles(r.smiles));
  for (int q = 0; q < 100 && o.ok; ++q) {
    const std::string query = q % 5 == 0 ? data[rng() % data.size()].smiles : random_smiles(rng);
    const std::string task = tasks[q % 2];
    const auto g = parse_smiles(query);
    const auto qbits = morgan_fingerprint(g, store.radius(), store.width()).on_bits();
    struct Scored {
      std::size_t both, either;
      std::uint64_t ordinal;
    };
    std::vector<Scored> all;
    for (std::size_t i = 0; i < store.records().size(); ++i) {
      const auto& r = store.records()[i];
      if (r.task != task || isomorphic(graphs[i], g)) continue;
      const auto bits = r.fingerprint.on_bits();
      std::vector<int> both, either;
      std::set_intersection(qbits.begin(), qbits.end(), bits.begin(), bits.end(), std::back_inserter(both));
      std::set_union(qbits.begin(), qbits.end(), bits.begin(), bits.end(), std::back_inserter(either));
      all.push_back({both.size(), either.size(), r.ordinal});
    }
    // Compare ratios by cross-multiplication; ties by ordinal.
    std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) {
      const auto lhs = a.both * std::max<std::size_t>(b.either, 1), rhs = b.both * std::max<std::size_t>(a.either, 1);
      return lhs != rhs ? lhs > rhs : a.ordinal < b.ordinal;
    });
    std::vector<std::uint64_t> expected, got;
    for (std::size_t i = 0; i < all.size() && i < 5; ++i) expected.push_back(all[i].ordinal);
    const auto hits = store.top_k(g, 5, task);
    for (const auto& h : hits) got.push_back(store.records()[h.record].ordinal);
    o.require(got == expected, "query " + std::to_string(q) + " (" + query + ") differs from the exhaustive scan");
    const auto again = store.top_k(g, 5, task);
    o.require(again.size() == hits.size() &&
                  std::equal(again.begin(), again.end(), hits.begin(),
                             [](const RetrievalHit& a, const RetrievalHit& b) { return a.record == b.record; }),
              "repeated query not deterministic");
  }
  if (o.ok) o.detail = "100 queries match exhaustive scan on 1000 records";
  return o;
}

Outcome grpo_advantages() {
  Outcome o;
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> reward(0.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 10000 && o.ok; ++i) {
    const std::size_t g = 2 + rng() % 15;
    std::vector<double> r(g);
    for (auto& x : r) x = rng() % 3 == 0 ? std::round(reward(rng) * 4) / 4 : reward(rng);
    if (std::all_of(r.begin(), r.end(), [&](double x) { return x == r[0]; })) r[0] += 0.25;
    const auto a = advantages(r);
    double sum = 0.0;
    for (double x : a) sum += x;
    const double mean = sum / static_cast<double>(g);
    worst = std::max(worst, std::abs(mean) / static_cast<double>(g));
    o.require(std::abs(mean) <= 1e-9 * static_cast<double>(g), "group " + std::to_string(i) + " mean " +
                                                                   std::to_string(mean));
  }
  const auto a = advantages(std::vector<double>{1, 0, 1, 0});
  const double expect[] = {1, -1, 1, -1};
  for (int i = 0; i < 4; ++i) o.require(std::abs(a[i] - expect[i]) <= 1e-7, "[1,0,1,0] example off");

  std::vector<RolloutGroup> groups;
  std::set<std::string> varied;
  for (int i = 0; i < 200; ++i) {
    RolloutGroup grp{"p" + std::to_string(i), {}, {}};
    const double base = static_cast<double>(rng() % 4);
    for (int k = 0; k < 5; ++k) grp.rewards.push_back(i % 3 == 0 ? base : base + static_cast<double>(rng() % 2));
    if (std::adjacent_find(grp.rewards.begin(), grp.rewards.end(), std::not_equal_to<>()) != grp.rewards.end()) {
      varied.insert(grp.prompt_id);
    }
    groups.push_back(grp);
  }
  const auto filtered = dynamic_filter(groups);
  std::set<std::string> kept;
  for (const auto& g : filtered.kept) kept.insert(g.prompt_id);
  o.require(kept == varied, "dynamic_filter kept set differs from the non-constant groups");
  o.require(filtered.report.dropped.at("zero_variance") == groups.size() - varied.size(), "dropped count wrong");
  if (o.ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "10000 groups, worst |mean|/G %.2e; [1,0,1,0] ok; %zu of %zu zero-variance dropped",
                  worst, groups.size() - varied.size(), groups.size());
    o.detail = buf;
  }
  return o;
}

Outcome smiles_round_trip() {
  Outcome o;
  const auto corpus = read_lines(fixture("smiles_corpus.txt"));
  const std::string bace = "ClC1=CC(=CC(Cl)=C1NC(=O)C)CNC(=[NH2+1])NC(=O)CN2C3=C(C=CC=C3)C=C2";
  o.require(corpus.size() >= 200, "corpus has fewer than 200 molecules");
  o.require(std::find(corpus.begin(), corpus.end(), bace) != corpus.end(), "BACE molecule missing from corpus");
  std::size_t ok = 0;
  for (const auto& smi : corpus) {
    try {
      const auto g = parse_smiles(smi);
      const auto back = parse_smiles(write_smiles(g));
      if (isomorphic(g, back)) ++ok;
      else o.require(false, "not isomorphic after round trip: " + smi);
    } catch (const Error& e) {
      o.require(false, smi + ": " + e.what());
    }
  }
  // (input, expected byte offset)
  const std::vector<std::pair<std::string, std::size_t>> malformed = {
      {"C(", 1}, {"CC)C", 2}, {"C1CC", 1}, {"CC[Xx]", 3}, {"CCX", 2}, {"CC(C)(C)(C)C", 1}, {"C*C", 1},
      {"C==C", 2}, {"C C", 1}};
  const std::vector<std::string> malformed_any = {"", "C=", "[CH4", "C()C", "[C+5]", "C11", "CC>CC", "[*]", "c1cc"};
  std::size_t positioned = 0;
  for (const auto& [text, offset] : malformed) {
    try {
      parse_smiles(text);
      o.require(false, "accepted malformed '" + text + "'");
    } catch (const SmilesError& e) {
      o.require(e.offset() == offset, "'" + text + "' offset " + std::to_string(e.offset()));
      positioned += e.offset() == offset;
    }
  }
  for (const auto& text : malformed_any) {
    try {
      parse_smiles(text);
      o.require(false, "accepted malformed '" + text + "'");
    } catch (const SmilesError& e) {
      o.require(e.offset() <= text.size(), "'" + text + "' offset past end");
      positioned += e.offset() <= text.size();
    }
  }
  if (o.ok) {
    o.detail = std::to_string(ok) + "/" + std::to_string(corpus.size()) + " round-trips incl. BACE; " +
               std::to_string(positioned) + " malformed inputs positioned";
  }
  return o;
}

Outcome descriptor_sanity() {
  Outcome o;
  double worst = 0.0;
  const auto logp_rows = read_lines(fixture("logp_reference.csv"));
  o.require(logp_rows.size() == 21, "LogP panel is not 20 molecules");
  for (std::size_t i = 1; i < logp_rows.size(); ++i) {
    const auto cells = split(logp_rows[i], ',');
    const double delta = std::abs(crippen_logp(parse_smiles(cells[1])) - std::stod(cells[2]));
    worst = std::max(worst, delta);
    o.require(delta <= 0.7, cells[0] + " LogP off by " + std::to_string(delta));
  }
  const auto desc_rows = read_lines(fixture("descriptor_reference.csv"));
  for (std::size_t i = 1; i < desc_rows.size(); ++i) {
    const auto c = split(desc_rows[i], ',');
    const auto rep = descriptor_report(parse_smiles(c[0]));
    o.require(rep.hbd == std::stoi(c[2]) && rep.hba == std::stoi(c[3]), c[0] + " hbd/hba");
    // MW is summed from fixed atomic masses; the fixture holds the same sum to 3 decimals.
    o.require(std::abs(rep.mol_weight - std::stod(c[4])) <= 1e-9, c[0] + " MW " + std::to_string(rep.mol_weight));
  }
  DescriptorReport edge;
  edge.mol_weight = 500.0;
  o.require(lipinski_report(edge).mol_weight_ok && lipinski_report(edge).pass(), "MW = 500 must pass");
  edge.mol_weight = std::nextafter(500.0, 501.0);
  o.require(!lipinski_report(edge).mol_weight_ok && !lipinski_report(edge).pass(), "MW just above 500 must fail");
  if (o.ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "20 LogP within 0.7 (worst %.3f); %zu hand fixtures exact; MW=500 boundary ok",
                  worst, desc_rows.size() - 1);
    o.detail = buf;
  }
  return o;
}

std::string run_cli(const std::string& args, int* status) {
  const std::string cmd = std::string(CHEMREWARD_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return {};
  std::string out;
  char buf[4096];
  while (auto n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  *status = WEXITSTATUS(::pclose(pipe));
  return out;
}

Outcome end_to_end() {
  Outcome o;
  const Engine engine{EngineConfig{}};
  const std::string response =
      "<think>The molecule is lipophilic with an aromatic ring and a hydroxyl group. It passes the rule of five. "
      "Like the first example, it is likely to cross.</think>\n<answer>True</answer>";
  const json req = {{"id", "same"},
                    {"smiles", "c1ccccc1CCO"},
                    {"label", true},
                    {"response", response},
                    {"fewshot", {{{"smiles", "c1ccccc1CO"}, {"label", true}}}}};
  std::string body;
  for (int i = 0; i < 1000; ++i) body += req.dump() + "\n";

  HttpService service(engine);
  const int port = service.bind({"127.0.0.1", 0});
  std::thread runner([&] { service.run(); });
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(10, 0);
  for (int i = 0; i < 100 && !client.Get("/v1/health"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  const auto res = client.Post("/v1/reward", body, "application/x-ndjson");
  service.stop();
  runner.join();
  o.require(res && res->status == 200, "HTTP request failed");
  if (!o.ok) return o;

  std::istringstream lines(res->body);
  std::string first, line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    if (count == 0) first = line;
    o.require(line == first, "response " + std::to_string(count) + " differs");
    ++count;
  }
  o.require(count == 1000, "expected 1000 responses, got " + std::to_string(count));
  o.require(first.find("\"error\"") == std::string::npos, "service returned an error: " + first);
  o.require(res->body == handle_batch(engine, body, BatchKind::Reward, 1), "HTTP differs from in-process batch");

  // CLI against the service, field by field.
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"c1ccccc1CCO", response},
      {"CC(=O)Oc1ccccc1C(=O)O", "<think>Hydrophilic and polar. It does not pass the rule of five.</think><answer>False</answer>"},
      {"CCN(CC)CC", "no tags"},
      {"O=C(O)CCc1ccncc1", "<think>It has a carboxylic acid and a pyridine. Unlikely.</think>\n<answer>True</answer>"},
      {"ClC1=CC(=CC(Cl)=C1NC(=O)C)CNC(=[NH2+1])NC(=O)CN2C3=C(C=CC=C3)C=C2",
       "<think>High molecular weight, aromatic, an amide and a guanidine.</think><answer>True</answer>"},
  };
  char tmpl[] = "/tmp/chemreward_acceptance_XXXXXX";
  const std::string dir = ::mkdtemp(tmpl) ? tmpl : "/tmp";
  std::size_t agreed = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto path = dir + "/r" + std::to_string(i) + ".txt";
    std::ofstream(path, std::ios::binary) << cases[i].second;
    int status = -1;
    const auto cli = run_cli("reward eval --molecule '" + cases[i].first + "' --label False --response-file " + path +
                                 " --id k" + std::to_string(i) + " --fewshot 'CCO=True'",
                             &status);
    const json sreq = {{"id", "k" + std::to_string(i)},
                       {"smiles", cases[i].first},
                       {"label", false},
                       {"response", cases[i].second},
                       {"fewshot", {{{"smiles", "CCO"}, {"label", true}}}}};
    const auto svc = json::parse(handle_reward_line(engine, sreq.dump(), 1));
    json got;
    try {
      got = json::parse(cli);
    } catch (const json::exception&) {
      o.require(false, "CLI output is not JSON: " + cli);
      continue;
    }
    bool same = status == 0 && got.size() == svc.size();
    for (const auto& [key, value] : svc.items()) same = same && got.contains(key) && got[key] == value;
    o.require(same, "CLI and service disagree on case " + std::to_string(i));
    agreed += same;
    std::remove(path.c_str());
  }
  ::rmdir(dir.c_str());
  if (o.ok) {
    o.detail = "1000 HTTP responses byte-identical; CLI = service on " + std::to_string(agreed) + " requests";
  }
  return o;
}

struct Criterion {
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"reward recombination", 1.0, reward_recombination},
      {"structure coverage formula", 1.0, structure_formula},
      {"ROC-AUC oracle equivalence", 10.0, auc_oracle},
      {"published table audit", 1.0, table_audit},
      {"retrieval vs exhaustive scan", 5.0, retrieval_oracle},
      {"GRPO advantages", 2.0, grpo_advantages},
      {"SMILES round-trip", 2.0, smiles_round_trip},
      {"descriptor sanity", 1.0, descriptor_sanity},
      {"end-to-end determinism", 10.0, end_to_end},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = out.ok && in_time;
    failures += !pass;
    std::printf("%s  %-30s %7.3f s (limit %.0f s)  %s%s\n", pass ? "PASS" : "FAIL", c.name, secs, c.limit_seconds,
                out.detail.c_str(), in_time ? "" : " [over time limit]");
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}
