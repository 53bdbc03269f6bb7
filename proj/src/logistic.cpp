#include "copronn/logistic.hpp"

#include <cmath>

#include "copronn/random.hpp"

namespace copronn {

namespace {

// log(1 + exp(-m))
double softplus_neg(double m) { return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)); }

// sigma(-m) = 1 / (1 + exp(m))
double sigmoid_neg(double m) {
  if (m >= 0.0) {
    const double e = std::exp(-m);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(m));
}

}  // namespace

double logistic_loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& labels, const Eigen::VectorXd& w, double b) {
  const Eigen::VectorXd z = (x * w).array() + b;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) sum += softplus_neg(labels[i] * z[i]);
  return sum / static_cast<double>(z.size());
}

Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& labels, const Eigen::VectorXd& w,
                                  double b) {
  const Eigen::VectorXd z = (x * w).array() + b;
  Eigen::VectorXd coeff(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) coeff[i] = -labels[i] * sigmoid_neg(labels[i] * z[i]);
  const double n = static_cast<double>(z.size());
  Eigen::VectorXd grad(w.size() + 1);
  grad.head(w.size()) = x.transpose() * coeff / n;
  grad[w.size()] = coeff.sum() / n;
  return grad;
}

LogisticModel fit_logistic(std::span<const EmbeddingVector> positives, std::span<const EmbeddingVector> negatives,
                           std::uint64_t seed, const LogisticOptions& options) {
  if (positives.empty() || negatives.empty()) {
    fail(ErrorKind::PreconditionFailed, "logistic fit needs at least one positive and one negative example");
  }
  const std::size_t dim = positives.front().dim();
  common_dimension(positives, dim, "positives");
  common_dimension(negatives, dim, "negatives");

  const auto n = static_cast<Eigen::Index>(positives.size() + negatives.size());
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd labels(n);
  Eigen::Index row = 0;
  for (const auto& p : positives) {
    x.row(row) = p.view().transpose();
    labels[row++] = 1.0;
  }
  for (const auto& q : negatives) {
    x.row(row) = q.view().transpose();
    labels[row++] = -1.0;
  }

  if (((x.rowwise() - x.row(0)).array() == 0.0).all()) {
    fail(ErrorKind::DegenerateData, "all training points are identical");
  }
  const double scale = std::sqrt(x.rowwise().squaredNorm().mean());
  x /= scale;

  Rng rng(derive_seed(seed, kStreamTrainerInit));
  Eigen::VectorXd w(d);
  for (Eigen::Index i = 0; i < d; ++i) w[i] = options.init_scale * standard_normal(rng);
  double b = 0.0;

  LogisticModel model;
  for (; model.iterations < options.max_iterations; ++model.iterations) {
    const Eigen::VectorXd grad = logistic_gradient(x, labels, w, b);
    if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      model.converged = true;
      break;
    }
    w -= options.learning_rate * grad.head(d);
    b -= options.learning_rate * grad[d];
  }

  const Eigen::VectorXd z = (x * w).array() + b;
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < n; ++i) correct += (labels[i] * z[i] > 0.0) ? 1 : 0;

  model.weights = w / scale;
  model.bias = b;
  model.feature_scale = scale;
  model.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return model;
}

}  // namespace copronn
