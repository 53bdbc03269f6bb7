#include <gtest/gtest.h>

#include <cmath>

#include "copronn/evaluation.hpp"
#include "copronn/random.hpp"

namespace copronn {
namespace {

TEST(CosineSimilarityTest, HandCases) {
  const std::vector<double> truth{1, 0, 1};
  EXPECT_NEAR(cosine_similarity(truth, std::vector<double>{0.5, 0.0, 0.5}), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(cosine_similarity(truth, std::vector<double>{0.0, 0.7, 0.0}), 0.0);
  // 0.6 / (sqrt(2) * sqrt(0.52))
  const double expected = 0.6 / (std::sqrt(2.0) * std::sqrt(0.52));
  EXPECT_NEAR(cosine_similarity(truth, std::vector<double>{0.6, 0.4, 0.0}), expected, 1e-15);
  EXPECT_NEAR(cosine_similarity(truth, std::vector<double>{0.6, 0.4, 0.0}), 0.5883, 1e-4);
}

TEST(CosineSimilarityTest, ZeroVectors) {
  const std::vector<double> truth{1, 0};
  EXPECT_EQ(cosine_similarity(truth, std::vector<double>{0.0, 0.0}), 0.0);
  try {
    (void)cosine_similarity(std::vector<double>{0.0, 0.0}, truth);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroVector);
  }
  EXPECT_THROW((void)cosine_similarity(truth, std::vector<double>{1.0}), Error);
}

TEST(CosineSimilarityProperty, ScaleInvariantAndBounded) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 1 + uniform_index(rng, 6);
    std::vector<double> u(m), v(m);
    for (auto& x : u) x = uniform_open_closed(rng);
    for (auto& x : v) x = uniform_open_closed(rng) - 0.2 < 0 ? 0.0 : uniform_open_closed(rng);
    const double cs = cosine_similarity(u, v);
    EXPECT_GE(cs, 0.0);
    EXPECT_LE(cs, 1.0);
    const double c = 0.01 + 100.0 * uniform_open_closed(rng);
    auto scaled = v;
    for (auto& x : scaled) x *= c;
    EXPECT_NEAR(cosine_similarity(u, scaled), cs, 1e-12);
  }
}

const std::vector<GroundTruthConceptVector> kTruths{GroundTruthConceptVector("A", {1, 0}),
                                                   GroundTruthConceptVector("B", {0, 1}),
                                                   GroundTruthConceptVector("C", {1, 1})};

TEST(EvaluateMethodTest, PerfectPredictions) {
  const std::vector<std::vector<double>> preds{{0.9, 0.0}, {0.7, 0.0}, {0.0, 0.2}};
  const std::vector<std::string> labels{"A", "A", "B"};
  const auto stats = evaluate_method(preds, labels, kTruths);
  ASSERT_EQ(stats.size(), 2u);
  EXPECT_EQ(stats[0], (ClassStats{"A", 1.0, 0.0, 2}));
  EXPECT_EQ(stats[1], (ClassStats{"B", 1.0, 0.0, 1}));
}

TEST(EvaluateMethodTest, PopulationStd) {
  const std::vector<std::vector<double>> preds{{1.0, 0.0}, {0.0, 1.0}};
  const std::vector<std::string> labels{"A", "A"};
  const auto stats = evaluate_method(preds, labels, kTruths);
  ASSERT_EQ(stats.size(), 1u);
  EXPECT_DOUBLE_EQ(stats[0].mean_cs, 0.5);
  EXPECT_DOUBLE_EQ(stats[0].std_cs, 0.5);
}

TEST(EvaluateMethodTest, OrderOfSamplesDoesNotMatter) {
  Rng rng(2);
  std::vector<std::vector<double>> preds;
  std::vector<std::string> labels;
  for (int i = 0; i < 50; ++i) {
    preds.push_back({uniform_open_closed(rng), uniform_open_closed(rng)});
    labels.push_back(i % 2 ? "C" : "A");
  }
  const auto forward = evaluate_method(preds, labels, kTruths);
  std::reverse(preds.begin(), preds.end());
  std::reverse(labels.begin(), labels.end());
  EXPECT_EQ(evaluate_method(preds, labels, kTruths), forward);
}

TEST(EvaluateMethodTest, UnknownLabel) {
  const std::vector<std::vector<double>> preds{{1.0, 0.0}};
  const std::vector<std::string> labels{"Z"};
  try {
    (void)evaluate_method(preds, labels, kTruths);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownClass);
  }
}

TEST(FormatTest, FourDecimals) {
  EXPECT_EQ(format_cell(0.99264, 0.00431), "0.9926 ± 0.0043");
  EXPECT_EQ(format_fixed4(1.0), "1.0000");
  EXPECT_EQ(format_fixed4(0.0), "0.0000");
}

MethodReport report(std::string name, std::vector<double> means) {
  MethodReport r{std::move(name), {}};
  const char* classes[] = {"A", "B"};
  for (std::size_t i = 0; i < means.size(); ++i) r.per_class.push_back({classes[i], means[i], 0.01, 4});
  return r;
}

TEST(CompareMethodsTest, BestCellsMarkedWithTies) {
  const std::vector<MethodReport> reports{report("CoProNN", {0.9, 0.5}), report("TCAV", {0.8, 0.5}),
                                          report("IBD", {0.85, 0.4})};
  const auto table = compare_methods(reports);
  ASSERT_EQ(table.classes, (std::vector<std::string>{"A", "B"}));
  EXPECT_TRUE(table.cells[0][0].best);
  EXPECT_FALSE(table.cells[0][1].best);
  EXPECT_FALSE(table.cells[0][2].best);
  EXPECT_TRUE(table.cells[1][0].best);
  EXPECT_TRUE(table.cells[1][1].best);
  EXPECT_FALSE(table.cells[1][2].best);
  EXPECT_EQ(table.cells[0][0].text, "0.9000 ± 0.0100");
  const auto md = table.to_markdown();
  EXPECT_NE(md.find("| A | **0.9000 ± 0.0100** | 0.8000 ± 0.0100 | 0.8500 ± 0.0100 |"), std::string::npos) << md;
}

TEST(CompareMethodsTest, SingleMethod) {
  const std::vector<MethodReport> reports{report("CoProNN", {0.9, 0.5})};
  const auto table = compare_methods(reports);
  EXPECT_EQ(table.methods.size(), 1u);
  EXPECT_TRUE(table.cells[0][0].best);
}

TEST(CompareMethodsTest, MissingClassIsMismatch) {
  const std::vector<MethodReport> reports{report("CoProNN", {0.9, 0.5}), report("TCAV", {0.8})};
  try {
    (void)compare_methods(reports);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ClassSetMismatch);
  }
}

TEST(ReportTest, CsvLayout) {
  EvalReport r;
  r.methods = {report("CoProNN", {0.99264, 0.5}), report("TCAV", {0.8, 0.25})};
  EXPECT_EQ(eval_report_csv(r),
            "class,method,mean_cs,std_cs,n\n"
            "A,CoProNN,0.9926,0.0100,4\n"
            "A,TCAV,0.8000,0.0100,4\n"
            "B,CoProNN,0.5000,0.0100,4\n"
            "B,TCAV,0.2500,0.0100,4\n");
  EXPECT_EQ(csv_field("A. bicolor"), "A. bicolor");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(ReportTest, ClassMeanScores) {
  const std::vector<std::vector<double>> preds{{1.0, 0.0}, {0.5, 0.5}, {0.0, 1.0}};
  const std::vector<std::string> labels{"A", "A", "B"};
  const std::vector<std::string> names{"A", "B", "C"};
  const auto means = class_mean_scores(preds, labels, names);
  EXPECT_EQ(means[0], (std::vector<double>{0.75, 0.25}));
  EXPECT_EQ(means[1], (std::vector<double>{0.0, 1.0}));
  EXPECT_TRUE(means[2].empty());
}

}  // namespace
}  // namespace copronn
