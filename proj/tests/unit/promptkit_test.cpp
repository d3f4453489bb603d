#include <gtest/gtest.h>

#include <cmath>
#include <regex>

#include "chemreward/promptkit.hpp"
#include "test_support.hpp"

using namespace chemreward;
namespace ts = chemreward::testing_support;

namespace {

const char* kBace = "ClC1=CC(=CC(Cl)=C1NC(=O)C)CNC(=[NH2+1])NC(=O)CN2C3=C(C=CC=C3)C=C2";

PromptSpec sample_spec() {
  PromptSpec spec;
  spec.task_text = TaskCatalog::builtin().text("BACE");
  spec.fewshot = {{"ClC1=CC(=CC(Cl)=C1NC(=O)C)CNC(=[NH2+1])NC(=O)CN2C3=CC(OC)=CC=C3C=C2", false},
                  {"ClC1=CC(=CC(Cl)=C1NC(=O)C)CNC(=[NH2+1])NC(=O)CN2C3=CC(CC)=CC=C3C=C2", true}};
  spec.molecule_smiles = kBace;
  return spec;
}

std::size_t occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

struct Point {
  double x, y;
};

std::vector<Point> atom_points(const std::string& svg) {
  static const std::regex re(R"re(class="atom" data-index="(\d+)" [^>]*data-x="([-0-9.]+)" data-y="([-0-9.]+)")re");
  std::vector<Point> pts;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    EXPECT_EQ(std::stoul((*it)[1]), pts.size());
    pts.push_back({std::stod((*it)[2]), std::stod((*it)[3])});
  }
  return pts;
}

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

TEST(Prompt, SectionsInOrder) {
  auto text = build_prompt(sample_spec());
  std::size_t last = 0;
  for (const char* name : {"[Role]", "[Task]", "[Formatting]", "[Example]", "[Few-shot]", "[Molecule]"}) {
    auto pos = text.find(std::string(name) + "\n");
    ASSERT_NE(pos, std::string::npos) << name;
    EXPECT_GE(pos, last) << name;
    last = pos;
  }
  EXPECT_NE(text.find("<think>"), std::string::npos);
  EXPECT_NE(text.find("<answer>True/False</answer>"), std::string::npos);
}

TEST(Prompt, FewShotRowsInOrder) {
  auto spec = sample_spec();
  auto text = build_prompt(spec);
  const auto first = text.find(spec.fewshot[0].smiles + " \xE2\x86\x92 False");
  const auto second = text.find(spec.fewshot[1].smiles + " \xE2\x86\x92 True");
  ASSERT_NE(first, std::string::npos);
  ASSERT_NE(second, std::string::npos);
  EXPECT_LT(first, second);
  for (const auto& ex : spec.fewshot) EXPECT_EQ(occurrences(text, ex.smiles), 1u);
}

TEST(Prompt, EmptyFewShotOmitsSection) {
  auto spec = sample_spec();
  spec.fewshot.clear();
  auto text = build_prompt(spec);
  EXPECT_EQ(text.find("[Few-shot]"), std::string::npos);
  EXPECT_EQ(split_prompt(text), spec);
}

TEST(Prompt, SplitterRecoversSpec) {
  auto spec = sample_spec();
  EXPECT_EQ(split_prompt(build_prompt(spec)), spec);
  spec.image_path = "images/mol_0001.svg";
  auto text = build_prompt(spec);
  EXPECT_NE(text.find("<image: images/mol_0001.svg>"), std::string::npos);
  EXPECT_EQ(split_prompt(text), spec);
  spec.task_text = "line one\n\nline three";
  EXPECT_EQ(split_prompt(build_prompt(spec)), spec);
}

TEST(Prompt, SplitterRejectsForeignText) {
  EXPECT_THROW(split_prompt("hello"), Error);
  EXPECT_THROW(split_prompt("[Task]\nx\n\n[Role]\ny\n"), Error);
}

TEST(Prompt, FormattingMustCarryTags) {
  auto spec = sample_spec();
  spec.formatting_text = "Answer briefly.";
  EXPECT_THROW(build_prompt(spec), Error);
}

TEST(Prompt, CatalogCoversDatasets) {
  const auto& catalog = TaskCatalog::builtin();
  for (const char* t : {"BACE", "BBBP", "SIDER", "HIV", "Bioavailability", "CYP2C9_V", "CYP2D6_V", "AMES"}) {
    ASSERT_TRUE(catalog.contains(t)) << t;
    EXPECT_NE(catalog.text(t).find("\"True\""), std::string::npos) << t;
  }
  EXPECT_EQ(catalog.text("BACE").rfind("BACE1 is an aspartic-acid protease", 0), 0u);
  EXPECT_THROW(catalog.text("Tox21"), Error);
  auto loaded = TaskCatalog::load(ts::data_path("tasks"));
  EXPECT_EQ(loaded.tasks(), catalog.tasks());
  EXPECT_EQ(loaded.text("HIV"), catalog.text("HIV"));
}

TEST(JudgePrompt, RubricPerDimension) {
  JudgePromptSpec spec{JudgeDimension::Conciseness, "Q?", "R."};
  auto c = build_judge_prompt(spec);
  EXPECT_NE(c.find("straight to the point"), std::string::npos);
  EXPECT_NE(c.find("- 10: Extremely concise, with no redundant or repetitive statements."), std::string::npos);
  spec.dimension = JudgeDimension::LogicalSoundness;
  auto l = build_judge_prompt(spec);
  EXPECT_NE(l.find("from 0 to 10"), std::string::npos);
  EXPECT_NE(l.find("Logical Soundness"), std::string::npos);
  spec.dimension = JudgeDimension::AccuracyInsight;
  EXPECT_NE(build_judge_prompt(spec).find("accuracy and insight value"), std::string::npos);
  EXPECT_NE(l.find("output only a single integer score"), std::string::npos);
}

TEST(JudgePrompt, BracesPassThroughVerbatim) {
  JudgePromptSpec spec{JudgeDimension::AccuracyInsight, "What is {question}?", "Answer: {{response}} <think>"};
  auto text = build_judge_prompt(spec);
  EXPECT_NE(text.find("What is {question}?"), std::string::npos);
  EXPECT_NE(text.find("Answer: {{response}} <think>"), std::string::npos);
}

TEST(JudgePrompt, DimensionNames) {
  EXPECT_EQ(parse_judge_dimension("accuracy_insight"), JudgeDimension::AccuracyInsight);
  EXPECT_THROW(parse_judge_dimension("style"), Error);
}

TEST(Depict, MethaneLabel) {
  auto svg = depict_svg(parse_smiles("C"));
  EXPECT_NE(svg.find(">CH4</text>"), std::string::npos);
  EXPECT_EQ(atom_points(svg).size(), 1u);
}

TEST(Depict, BenzeneIsRegularHexagon) {
  auto g = parse_smiles("c1ccccc1");
  auto pts = atom_points(depict_svg(g));
  ASSERT_EQ(pts.size(), 6u);
  for (const auto& b : g.bonds()) {
    EXPECT_NEAR(dist(pts[static_cast<std::size_t>(b.a)], pts[static_cast<std::size_t>(b.b)]), kDepictBondLength,
                1e-6);
  }
  // Opposite vertices sit two bond lengths apart on a regular hexagon.
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(dist(pts[i], pts[i + 3]), 2 * kDepictBondLength, 1e-6);
}

TEST(Depict, Deterministic) {
  auto g = parse_smiles(kBace);
  EXPECT_EQ(depict_svg(g), depict_svg(parse_smiles(kBace)));
}

TEST(Depict, OneEdgePerBondOneVertexPerAtom) {
  for (const auto& smiles : ts::load_corpus()) {
    auto g = parse_smiles(smiles);
    auto svg = depict_svg(g);
    EXPECT_EQ(occurrences(svg, "<g class=\"bond\""), g.bond_count()) << smiles;
    EXPECT_EQ(atom_points(svg).size(), g.atom_count()) << smiles;
    EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
    EXPECT_EQ(svg.find("\"nan"), std::string::npos) << smiles;
    EXPECT_EQ(svg.find("\"-nan"), std::string::npos) << smiles;
  }
}

TEST(Depict, ChainBondsHaveBondLength) {
  auto g = parse_smiles("CCCCCC(C)(C)CC=O");
  auto pts = atom_points(depict_svg(g));
  for (const auto& b : g.bonds()) {
    EXPECT_NEAR(dist(pts[static_cast<std::size_t>(b.a)], pts[static_cast<std::size_t>(b.b)]), kDepictBondLength,
                1e-6);
  }
  // Zigzag: consecutive chain bonds meet at 120 degrees.
  EXPECT_NEAR(dist(pts[0], pts[2]), kDepictBondLength * std::sqrt(3.0), 1e-6);
}
