#include <gtest/gtest.h>

#include <random>

#include "chemreward/reward.hpp"
#include "test_support.hpp"

using namespace chemreward;
namespace ts = chemreward::testing_support;

namespace {

FeatureSet features(std::initializer_list<const char*> names) {
  FeatureSet s;
  for (const char* n : names) s.add(n);
  return s;
}

DescriptorReport report_of(const char* smiles) { return descriptor_report(parse_smiles(smiles)); }

std::string wrap(const std::string& think, const char* answer = "True") {
  return "<think>" + think + "</think>\n<answer>" + answer + "</answer>";
}

}  // namespace

TEST(ParseResponse, Examples) {
  auto p = parse_response("<think>x</think><answer>True</answer>");
  EXPECT_EQ(p.think, "x");
  EXPECT_EQ(p.answer, true);
  EXPECT_TRUE(p.format_ok);

  p = parse_response("<think>x</think>");
  EXPECT_FALSE(p.answer.has_value());
  EXPECT_FALSE(p.format_ok);

  p = parse_response("<think>a</think><answer>maybe</answer>");
  EXPECT_FALSE(p.answer.has_value());
  EXPECT_FALSE(p.format_ok);
}

TEST(ParseResponse, AnswerCaseAndWhitespace) {
  auto p = parse_response("<think>x</think>\n<answer>  false \n</answer>\n  ");
  EXPECT_EQ(p.answer, false);
  EXPECT_TRUE(p.format_ok);
  EXPECT_EQ(parse_response("<think>x</think><answer>TRUE</answer>").answer, true);
}

TEST(FormatReward, StructureViolations) {
  EXPECT_EQ(format_reward(wrap("reasoning")), 1.0);
  EXPECT_EQ(format_reward("<answer>True</answer><think>x</think>"), 0.0);
  EXPECT_EQ(format_reward("<think>x</think><answer>True</answer><answer>True</answer>"), 0.0);
  EXPECT_EQ(format_reward("<think>x</think><think>y</think><answer>True</answer>"), 0.0);
  EXPECT_EQ(format_reward("<think>x</think><answer>True</answer> extra"), 0.0);
  EXPECT_EQ(format_reward("<think>x<answer>True</answer>"), 0.0);
  EXPECT_EQ(format_reward(""), 0.0);
  // The answer still counts for r_ans when only the format is broken.
  EXPECT_EQ(answer_reward(parse_response("<answer>True</answer><think>x</think>"), true), 1.0);
}

TEST(AnswerReward, Examples) {
  EXPECT_EQ(answer_reward(parse_response(wrap("x", "True")), true), 1.0);
  EXPECT_EQ(answer_reward(parse_response(wrap("x", "False")), true), 0.0);
  EXPECT_EQ(answer_reward(parse_response("<think>x</think>"), false), 0.0);
}

TEST(ConsistencyReward, Examples) {
  EXPECT_EQ(consistency_reward("The amide is polar. Therefore the molecule is likely active.", true), 1.0);
  EXPECT_EQ(consistency_reward("It has a large ring. It is unlikely to inhibit the enzyme.", true), 0.0);
  EXPECT_EQ(consistency_reward("It is unlikely to inhibit the enzyme.", false), 1.0);
  EXPECT_EQ(consistency_reward("The ring has six atoms.", true), 0.0);
  EXPECT_EQ(consistency_reward("The ring has six atoms.", false), 0.0);
  EXPECT_EQ(consistency_reward("It is likely active.", std::nullopt), 0.0);
}

TEST(ConsistencyReward, OnlyConclusionWindowCounts) {
  // The first sentence is outside the last-three window.
  const std::string think = "It is inactive. One. Two. It is likely active.";
  EXPECT_EQ(consistency_reward(think, true), 1.0);
  EXPECT_EQ(consistency_reward("It is likely active. One. Two. It is inactive.", true), 0.0);
}

TEST(ConsistencyReward, TiesGoNegative) {
  EXPECT_EQ(consistency_reward("It is active but weak.", true), 0.0);
  EXPECT_EQ(consistency_reward("It is active but weak.", false), 1.0);
  // Longest phrase wins, so "not likely" is a single negative hit.
  EXPECT_EQ(consistency_reward("It is not likely to be potent.", true), 0.0);
  EXPECT_EQ(consistency_reward("It is not likely.", false), 1.0);
}

TEST(ComparativeReward, Examples) {
  std::vector<FewShotExample> shots = {{"CCOC(=O)c1ccccc1N", false}, {"ClC1=CC(=CC(Cl)=C1NC(=O)C)CN", true}};
  EXPECT_EQ(comparative_reward("The fragment C1=CC(=CC(Cl) matches the second one.", shots), 1.0);
  EXPECT_EQ(comparative_reward("Comparing with Example 2, which is labeled True, the amide is kept.", shots), 1.0);
  EXPECT_EQ(comparative_reward("The molecule has an amide and a chlorine.", shots), 0.0);
  EXPECT_EQ(comparative_reward("Comparing with Example 2, which is labeled True.", {}), 0.0);
}

TEST(ComparativeReward, BoundaryLengthAndSentenceScope) {
  std::vector<FewShotExample> shots = {{"CCOC(=O)c1ccccc1N", false}};
  EXPECT_EQ(comparative_reward("see CCOC(=O) here", shots), 1.0);   // 8 chars
  EXPECT_EQ(comparative_reward("see CCOC(=O here", shots), 0.0);    // 7 chars
  EXPECT_EQ(comparative_reward("A similar molecule exists. The answer is True.", shots), 0.0);
}

TEST(PrincipleReward, Examples) {
  EXPECT_EQ(principle_reward("Benzene has an aromatic ring.", report_of("c1ccccc1")), 1.0);
  EXPECT_LT(report_of("CO").logp, 0.0);
  EXPECT_EQ(principle_reward("Methanol is highly hydrophobic.", report_of("CO")), 0.0);
  EXPECT_EQ(principle_reward("Benzene is aromatic. It is very hydrophilic.", report_of("c1ccccc1")), 0.5);
  EXPECT_EQ(principle_reward("Nothing to see.", report_of("c1ccccc1")), 0.0);
}

TEST(PrincipleReward, RepeatsCountOnce) {
  EXPECT_EQ(principle_reward("Aromatic. Aromatic again. Still aromatic. Hydrophilic.", report_of("c1ccccc1")), 0.5);
}

TEST(PrincipleReward, LipinskiPolarity) {
  const auto small = report_of("CCO");
  EXPECT_EQ(principle_reward("It satisfies Lipinski's rule.", small), 1.0);
  EXPECT_EQ(principle_reward("It does not satisfy the rule of five.", small), 0.0);
  EXPECT_EQ(principle_reward("There are no violations of the rule of five.", small), 1.0);
  const auto big = report_of("CCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCC");
  ASSERT_FALSE(lipinski_report(big).pass());
  EXPECT_EQ(principle_reward("It violates Lipinski's rule.", big), 1.0);
}

TEST(PrincipleReward, MolecularWeightClaims) {
  const auto big = report_of("CCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCC");
  EXPECT_EQ(principle_reward("It has a high molecular weight.", big), 1.0);
  EXPECT_EQ(principle_reward("It has a low molecular weight.", big), 0.0);
  EXPECT_EQ(principle_reward("Two hydrogen bond donors are present.", report_of("OCCO")), 1.0);
  EXPECT_EQ(principle_reward("Two hydrogen bond donors are present.", report_of("CCCC")), 0.0);
}

TEST(StructureReward, Examples) {
  const auto actual = features({"hydroxyl", "aromatic_ring"});
  EXPECT_EQ(structure_reward("A hydroxyl group sits on the aromatic ring.", actual), 2.0 / (2.0 + 1e-5));
  EXPECT_NEAR(structure_reward("A hydroxyl group sits on the aromatic ring.", actual), 0.999995, 1e-9);
  EXPECT_EQ(structure_reward("Nothing structural.", actual), 0.0);
  EXPECT_EQ(structure_reward("The OH group matters.", actual), 1.0 / (2.0 + 1e-5));
  EXPECT_NEAR(structure_reward("The OH group matters.", actual), 0.4999975, 1e-9);
  EXPECT_EQ(structure_reward("hydroxyl", FeatureSet{}), 0.0);
}

TEST(StructureReward, Monotone) {
  const auto actual = features({"hydroxyl", "aromatic_ring", "amide"});
  const double base = structure_reward("An alcohol.", actual);
  EXPECT_GT(structure_reward("An alcohol and an amide.", actual), base);
  // Absent features leave the score alone.
  EXPECT_EQ(structure_reward("An alcohol, a nitrile and a thiol.", actual), base);
}

TEST(StructureReward, UniverseOnly) {
  auto cfg = RewardConfig::builtin();
  for (const auto& name : mentioned_features("hydroxyl phenyl amide nitro chiral bicyclic", cfg)) {
    auto u = feature_universe(builtin_library());
    EXPECT_TRUE(std::binary_search(u.begin(), u.end(), name)) << name;
  }
  EXPECT_THROW(RewardConfig::parse("synonym.kryptonite = green rock\n"), Error);
}

TEST(TotalReward, Examples) {
  RewardRequest req;
  req.molecule = "CCO";
  req.label = true;
  req.response_text = "";
  auto b = total_reward(req);
  EXPECT_EQ(b.r_total, 0.0);
  EXPECT_EQ(b.r_ans, 0.0);
  EXPECT_EQ(b.r_fmt, 0.0);

  req.response_text = "<think>x</think><answer>True</answer>";
  b = total_reward(req);
  EXPECT_EQ(b.r_total, 2.0);
  EXPECT_EQ(b.r_cons + b.r_comp + b.r_prin + b.r_struct, 0.0);

  EXPECT_EQ(combine_reward(RewardWeights{}, 1, 1, 1, 1, 1, 1), 3.0);
}

TEST(TotalReward, UnparseableMoleculeIsAnError) {
  RewardRequest req;
  req.molecule = "C1CC";
  req.response_text = wrap("x");
  EXPECT_THROW(total_reward(req), SmilesError);
  req.molecule = "CCO";
  req.weights = RewardWeights{-1, 0, 0};
  EXPECT_THROW(total_reward(req), Error);
}

TEST(TotalReward, FullMarksOnWorkedExample) {
  RewardRequest req;
  req.molecule = "OCc1ccccc1";
  req.label = true;
  req.fewshot = {{"OCc1ccc(Cl)cc1", true}};
  req.response_text = wrap(
      "The molecule has a hydroxyl group on a benzylic carbon next to an aromatic ring. "
      "It resembles the reference compound OCc1ccc(Cl)cc1, labeled True. "
      "Therefore the molecule is likely active.");
  auto b = total_reward(req);
  EXPECT_EQ(b.r_ans, 1.0);
  EXPECT_EQ(b.r_fmt, 1.0);
  EXPECT_EQ(b.r_cons, 1.0);
  EXPECT_EQ(b.r_comp, 1.0);
  EXPECT_EQ(b.r_prin, 1.0);
  EXPECT_EQ(b.r_struct, 2.0 / (2.0 + 1e-5));
}

TEST(TotalReward, ExactRecombinationAndRange) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0), lam(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    RewardWeights w{lam(rng), lam(rng), lam(rng)};
    double c[6];
    for (double& x : c) x = unit(rng);
    const double total = combine_reward(w, c[0], c[1], c[2], c[3], c[4], c[5]);
    EXPECT_EQ(total, w.lambda1 * (c[0] + c[1]) + w.lambda2 * (c[2] + c[3]) + w.lambda3 * (c[4] + c[5]));
    EXPECT_GE(total, 0.0);
    EXPECT_LE(total, 2 * (w.lambda1 + w.lambda2 + w.lambda3));
  }
}

TEST(TotalReward, LabelFlipTouchesOnlyAnswer) {
  RewardRequest req;
  req.molecule = "CC(=O)Nc1ccc(O)cc1";
  req.label = true;
  req.response_text = wrap("A phenol and an amide. It is polar and aromatic. It is likely active.");
  auto a = total_reward(req);
  req.label = false;
  auto b = total_reward(req);
  EXPECT_EQ(a.r_ans, 1.0 - b.r_ans);
  EXPECT_EQ(a.r_fmt, b.r_fmt);
  EXPECT_EQ(a.r_cons, b.r_cons);
  EXPECT_EQ(a.r_comp, b.r_comp);
  EXPECT_EQ(a.r_prin, b.r_prin);
  EXPECT_EQ(a.r_struct, b.r_struct);
}

TEST(TotalReward, ComponentsInUnitRangeOverCorpus) {
  std::mt19937_64 rng(11);
  const auto corpus = ts::load_corpus();
  const char* thinks[] = {"aromatic hydrophobic amide", "polar, chiral, no Lipinski violations. Likely active.",
                          "", "Example 1 is True. hydroxyl"};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    RewardRequest req;
    req.molecule = corpus[i];
    req.label = (rng() & 1U) != 0;
    req.fewshot = {{corpus[(i + 1) % corpus.size()], true}};
    req.response_text = wrap(thinks[i % 4], i % 3 == 0 ? "False" : "True");
    auto b = total_reward(req);
    for (double v : {b.r_ans, b.r_fmt, b.r_cons, b.r_comp, b.r_prin, b.r_struct}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(b, total_reward(req));
  }
}

TEST(RewardConfig, BuiltinDefaults) {
  const auto& cfg = RewardConfig::builtin();
  EXPECT_EQ(cfg.weights, (RewardWeights{1.0, 0.25, 0.25}));
  EXPECT_EQ(cfg.conclusion_sentences, 3u);
  EXPECT_EQ(cfg.min_smiles_substring, 8u);
  EXPECT_EQ(cfg.claims.size(), 8u);
  EXPECT_EQ(cfg.synonyms.size(), feature_universe(builtin_library()).size());
  EXPECT_EQ(RewardConfig::load(ts::data_path("reward.conf")), cfg);
}

TEST(RewardConfig, DumpRoundTrips) {
  const auto& cfg = RewardConfig::builtin();
  EXPECT_EQ(RewardConfig::parse(cfg.dump()), cfg);
  auto changed = cfg;
  changed.weights.lambda2 = 0.1;
  changed.claims[0].threshold = 2.5;
  EXPECT_EQ(RewardConfig::parse(changed.dump()), changed);
}

TEST(RewardConfig, Errors) {
  EXPECT_THROW(RewardConfig::parse("colour = red\n"), Error);
  EXPECT_THROW(RewardConfig::parse("lambda1 = -1\n"), Error);
  EXPECT_THROW(RewardConfig::parse("lambda1 = abc\n"), Error);
  EXPECT_THROW(RewardConfig::parse("lambda1 = 1\nlambda1 = 2\n"), Error);
  EXPECT_THROW(RewardConfig::parse("claim = greasy | logp >> 3\n"), Error);
  EXPECT_THROW(RewardConfig::parse("claim = greasy | charge >= 3\n"), Error);
  EXPECT_THROW(RewardConfig::parse("claim = greasy\n"), Error);
  try {
    RewardConfig::parse("# c\n\nnope\n", "x.conf");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "config_error");
    EXPECT_EQ(std::string(e.what()).rfind("x.conf:3:", 0), 0u);
  }
}
