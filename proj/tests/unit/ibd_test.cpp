#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "copronn/ibd.hpp"
#include "fixtures.hpp"

namespace copronn {
namespace {

using testing::make_concept;

double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
}

constexpr double kDegree = std::numbers::pi / 180.0;

ConceptBasis basis_of(std::initializer_list<Eigen::VectorXd> columns) {
  ConceptBasis b;
  b.vectors.resize(columns.begin()->size(), static_cast<Eigen::Index>(columns.size()));
  Eigen::Index j = 0;
  for (const auto& c : columns) b.vectors.col(j++) = c.normalized();
  return b;
}

const Embeddings kSymmetricNegatives{{0.0, 0.0}, {0.3, 0.0}, {-0.3, 0.0}, {0.0, 0.3}, {0.0, -0.3}};

TEST(ConceptBasisTest, RecoversAxisConcepts) {
  const std::vector<ConceptSet> concepts{
      make_concept(0, "x", {{1.0, 0.2}, {1.0, -0.2}, {1.2, 0.1}, {1.2, -0.1}}),
      make_concept(1, "y", {{0.2, 1.0}, {-0.2, 1.0}, {0.1, 1.2}, {-0.1, 1.2}})};
  const auto basis = fit_concept_basis(concepts, kSymmetricNegatives, 4);
  ASSERT_EQ(basis.size(), 2u);
  EXPECT_LT(angle_between(basis.vector(0), Eigen::Vector2d(1.0, 0.0)), 5.0 * kDegree);
  EXPECT_LT(angle_between(basis.vector(1), Eigen::Vector2d(0.0, 1.0)), 5.0 * kDegree);
  EXPECT_NEAR(basis.vector(0).norm(), 1.0, 1e-12);
}

TEST(ConceptBasisTest, DuplicateConceptsGiveMatchingVectors) {
  const Embeddings protos{{1.0, 0.5}, {0.2, -0.4}, {0.8, 0.1}, {-0.1, 0.2}};
  const Embeddings negatives{{-1.0, 0.1}, {-0.3, -0.6}, {0.3, 0.2}, {-0.7, 0.3}};
  const std::vector<ConceptSet> concepts{make_concept(0, "a", protos), make_concept(1, "b", protos)};
  const auto basis = fit_concept_basis(concepts, negatives, 9);
  EXPECT_LT(angle_between(basis.vector(0), basis.vector(1)), 1.0 * kDegree);
}

TEST(ConceptBasisTest, SingleConcept) {
  const std::vector<ConceptSet> concepts{make_concept(0, "x", {{1.0, 0.0}, {1.1, 0.1}})};
  const auto basis = fit_concept_basis(concepts, kSymmetricNegatives, 0);
  EXPECT_EQ(basis.size(), 1u);
  EXPECT_EQ(basis.dim(), 2u);
}

TEST(DecomposeTest, ExactSingleConcept) {
  const auto basis = basis_of({Eigen::Vector2d(1.0, 0.0)});
  const auto d = decompose_class(Eigen::Vector2d(1.0, 0.0), basis, 1);
  EXPECT_DOUBLE_EQ(d.coefficients[0], 1.0);
  EXPECT_LT(d.residual.norm(), 1e-15);
  const auto s = ibd_sample_scores({2.0, 3.0}, d, basis);
  EXPECT_DOUBLE_EQ(s[0], 1.0);
}

TEST(DecomposeTest, OrthogonalBasisExplainsNothing) {
  const auto basis = basis_of({Eigen::Vector2d(0.0, 1.0)});
  const Eigen::Vector2d w(1.0, 0.0);
  const auto d = decompose_class(w, basis, 1);
  EXPECT_EQ(d.coefficients[0], 0.0);
  EXPECT_TRUE(d.selected.empty());
  EXPECT_EQ(d.residual, w);
}

TEST(DecomposeTest, TwoAxisSplit) {
  const auto basis = basis_of({Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0)});
  const Eigen::Vector2d w(0.6, 0.8);
  const auto d = decompose_class(w, basis, 2);
  EXPECT_NEAR(d.coefficients[0], 0.6, 1e-12);
  EXPECT_NEAR(d.coefficients[1], 0.8, 1e-12);
  EXPECT_EQ(d.selected, (std::vector<std::size_t>{1, 0}));

  const EmbeddingVector a{1.0, 1.0};
  const auto s = ibd_sample_scores(a, d, basis);
  EXPECT_NEAR(s[0], 3.0 / 7.0, 1e-12);
  EXPECT_NEAR(s[1], 4.0 / 7.0, 1e-12);
  EXPECT_NEAR(s[0], 0.4286, 1e-4);
  EXPECT_NEAR(s[1], 0.5714, 1e-4);
  EXPECT_NEAR(ibd_residual_term(a, d), 0.0, 1e-12);

  const auto c = ibd_class_scores(d, basis);
  EXPECT_NEAR(c[0], 0.36, 1e-12);
  EXPECT_NEAR(c[1], 0.64, 1e-12);
}

TEST(DecomposeTest, MaxComponentsCapsSelection) {
  const auto basis = basis_of({Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0)});
  const auto d = decompose_class(Eigen::Vector2d(0.6, 0.8), basis, 1);
  EXPECT_EQ(d.selected, (std::vector<std::size_t>{1}));
  EXPECT_EQ(d.coefficients[0], 0.0);
  EXPECT_NEAR(d.residual(0), 0.6, 1e-12);
}

TEST(DecomposeTest, ScoresPlusResidualSumToOne) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    ConceptBasis basis;
    basis.vectors.resize(5, 3);
    for (Eigen::Index j = 0; j < 3; ++j) basis.vectors.col(j) = testing::random_vector(rng, 5).view().normalized();
    const Eigen::VectorXd w = testing::random_vector(rng, 5).view();
    const auto d = decompose_class(w, basis, 3);
    Eigen::VectorXd rebuilt = d.residual;
    for (std::size_t j = 0; j < 3; ++j) rebuilt += d.coefficients[j] * basis.vector(j);
    EXPECT_LE((rebuilt - w).norm(), 1e-12);
    const auto a = testing::random_vector(rng, 5);
    const auto s = ibd_sample_scores(a, d, basis);
    const double total = s[0] + s[1] + s[2] + ibd_residual_term(a, d);
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(DecomposeTest, ZeroLogitRejected) {
  const auto basis = basis_of({Eigen::Vector2d(1.0, 0.0)});
  const auto d = decompose_class(Eigen::Vector2d(1.0, 0.0), basis, 1);
  try {
    (void)ibd_sample_scores({0.0, 1.0}, d, basis);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroLogit);
  }
}

TEST(ClampTest, NegativesBecomeZero) {
  const std::vector<double> raw{0.5, -0.2, 0.0, 1.3};
  EXPECT_EQ(clamp_negative_scores(raw), (std::vector<double>{0.5, 0.0, 0.0, 1.3}));
  const std::vector<double> all_negative{-1.0, -0.1};
  EXPECT_EQ(clamp_negative_scores(all_negative), (std::vector<double>{0.0, 0.0}));
}

}  // namespace
}  // namespace copronn
