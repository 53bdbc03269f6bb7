#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "copronn/core.hpp"

namespace copronn {

struct LogisticOptions {
  double learning_rate = 0.1;
  std::size_t max_iterations = 5000;
  double gradient_tolerance = 1e-6;  // on the inf-norm of the full gradient
  double init_scale = 1e-3;          // std of the seeded initial weights
};

/// Binary linear classifier separating positives (+1) from negatives (-1).
struct LogisticModel {
  Eigen::VectorXd weights;  // in the caller's feature space
  double bias = 0.0;
  double feature_scale = 1.0;  // RMS row norm used to condition training
  std::size_t iterations = 0;
  bool converged = false;
  double accuracy = 0.0;  // on the training data
};

/// Mean logistic loss (1/n) sum log(1 + exp(-y_i (w.x_i + b))), labels in {-1,+1}.
/// Rows of `x` are samples.
double logistic_loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& labels, const Eigen::VectorXd& w, double b);

/// Gradient of logistic_loss; entries 0..D-1 are d/dw, entry D is d/db.
Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& labels, const Eigen::VectorXd& w,
                                  double b);

/// Full-batch gradient descent. Features are divided by their RMS row norm
/// before training so the step size is independent of embedding magnitude;
/// the returned weights are mapped back to the original space.
/// Throws DegenerateData if every point is identical.
LogisticModel fit_logistic(std::span<const EmbeddingVector> positives, std::span<const EmbeddingVector> negatives,
                           std::uint64_t seed, const LogisticOptions& options = {});

}  // namespace copronn
