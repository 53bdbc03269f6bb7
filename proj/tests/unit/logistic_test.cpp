#include <gtest/gtest.h>

#include <cmath>

#include "copronn/logistic.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace copronn {
namespace {

Eigen::MatrixXd stack(const Embeddings& rows) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().dim()));
  for (std::size_t i = 0; i < rows.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = rows[i].view().transpose();
  return x;
}

TEST(LogisticLossTest, ZeroWeightsGiveLogTwo) {
  Eigen::MatrixXd x(2, 1);
  x << 1.0, -1.0;
  Eigen::VectorXd y(2);
  y << 1.0, -1.0;
  EXPECT_NEAR(logistic_loss(x, y, Eigen::VectorXd::Zero(1), 0.0), std::log(2.0), 1e-15);
}

TEST(LogisticLossTest, LargeMarginsStayFinite) {
  Eigen::MatrixXd x(1, 1);
  x << 1.0;
  Eigen::VectorXd y(1);
  y << -1.0;
  EXPECT_NEAR(logistic_loss(x, y, Eigen::VectorXd::Constant(1, 1000.0), 0.0), 1000.0, 1e-9);
  y << 1.0;
  EXPECT_NEAR(logistic_loss(x, y, Eigen::VectorXd::Constant(1, 1000.0), 0.0), 0.0, 1e-12);
}

TEST(LogisticGradientTest, MatchesCentralDifferences) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + uniform_index(rng, 20);
    const std::size_t d = 1 + uniform_index(rng, 8);
    const Eigen::MatrixXd x = stack(testing::random_vectors(rng, n, d));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (auto& v : y) v = uniform_index(rng, 2) ? 1.0 : -1.0;
    Eigen::VectorXd theta(static_cast<Eigen::Index>(d + 1));
    for (auto& v : theta) v = standard_normal(rng);
    const auto loss = [&](const Eigen::VectorXd& th) {
      return logistic_loss(x, y, th.head(static_cast<Eigen::Index>(d)), th(static_cast<Eigen::Index>(d)));
    };
    const Eigen::VectorXd analytic =
        logistic_gradient(x, y, theta.head(static_cast<Eigen::Index>(d)), theta(static_cast<Eigen::Index>(d)));
    const Eigen::VectorXd numeric = testing::central_difference(loss, theta, 1e-5);
    EXPECT_LE((analytic - numeric).norm(), 1e-4 * std::max(1e-8, numeric.norm())) << "trial " << trial;
  }
}

TEST(FitLogisticTest, SeparatesSimpleData) {
  const Embeddings pos{{1.0, 0.3}, {2.0, -0.2}, {1.5, 0.1}};
  const Embeddings neg{{-1.0, 0.2}, {-2.0, -0.1}, {-1.5, 0.0}};
  const auto model = fit_logistic(pos, neg, 1);
  EXPECT_DOUBLE_EQ(model.accuracy, 1.0);
  EXPECT_GT(model.weights(0), 0.0);
  EXPECT_GT(std::abs(model.weights(0)), 5.0 * std::abs(model.weights(1)));
}

TEST(FitLogisticTest, ConvergesOnOverlappingData) {
  // negatives mirror the positives, which surround the origin: bounded optimum
  const Embeddings pos{{1.0, 0.0}, {0.5, 0.5}, {-0.8, 0.0}, {0.2, -0.4}};
  const Embeddings neg{{-1.0, 0.0}, {-0.5, -0.5}, {0.8, 0.0}, {-0.2, 0.4}};
  const auto model = fit_logistic(pos, neg, 1);
  EXPECT_TRUE(model.converged);
  EXPECT_LT(model.iterations, 5000u);
}

TEST(FitLogisticTest, SameSeedSameModel) {
  Rng rng(4);
  const auto pos = testing::random_vectors(rng, 10, 5);
  const auto neg = testing::random_vectors(rng, 10, 5);
  const auto a = fit_logistic(pos, neg, 77);
  const auto b = fit_logistic(pos, neg, 77);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(FitLogisticTest, IdenticalPointsAreDegenerate) {
  const Embeddings pos{{1.0, 1.0}};
  const Embeddings neg{{1.0, 1.0}, {1.0, 1.0}};
  try {
    (void)fit_logistic(pos, neg, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateData);
  }
}

}  // namespace
}  // namespace copronn
