#include "copronn/tcav.hpp"

#include <cmath>

namespace copronn {

GradientOracle linear_head_oracle(LinearHead head) {
  return [head = std::move(head)](const EmbeddingVector& sample, std::size_t class_index) -> Eigen::VectorXd {
    if (class_index >= head.classes()) fail(ErrorKind::PreconditionFailed, "class index out of range for head");
    if (sample.dim() != head.dim()) {
      fail(ErrorKind::DimensionMismatch, "head expects dim " + std::to_string(head.dim()));
    }
    return head.class_weights(class_index);
  };
}

CAV fit_cav(const ConceptSet& concept_set, std::span<const EmbeddingVector> negatives, std::uint64_t seed,
            const LogisticOptions& options) {
  const auto model = fit_logistic(concept_set.embeddings, negatives, seed, options);
  const double norm = model.weights.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    fail(ErrorKind::DegenerateData, "separator for concept '" + concept_set.name + "' has no direction");
  }
  CAV cav;
  cav.concept_index = concept_set.index;
  cav.vector = model.weights / norm;
  cav.accuracy = model.accuracy;
  return cav;
}

namespace {

bool positive_derivative(const Eigen::VectorXd& grad, const CAV& cav) {
  if (grad.size() != cav.vector.size()) fail(ErrorKind::DimensionMismatch, "gradient and CAV differ in dimension");
  return grad.dot(cav.vector) > 0.0;
}

}  // namespace

double tcav_sample_score(const EmbeddingVector& sample, std::size_t class_index, std::span<const CAV> cavs,
                         const GradientOracle& oracle) {
  if (cavs.empty()) fail(ErrorKind::PreconditionFailed, "TCAV score needs at least one CAV");
  const Eigen::VectorXd grad = oracle(sample, class_index);
  std::size_t positive = 0;
  for (const auto& cav : cavs) positive += positive_derivative(grad, cav) ? 1 : 0;
  return static_cast<double>(positive) / static_cast<double>(cavs.size());
}

double tcav_class_score(std::span<const EmbeddingVector> samples, std::size_t class_index, std::span<const CAV> cavs,
                        const GradientOracle& oracle) {
  if (cavs.empty()) fail(ErrorKind::PreconditionFailed, "TCAV score needs at least one CAV");
  if (samples.empty()) fail(ErrorKind::PreconditionFailed, "TCAV class score needs at least one sample");
  std::size_t hits = 0;
  for (const auto& s : samples) {
    const Eigen::VectorXd grad = oracle(s, class_index);
    bool all = true;
    for (const auto& cav : cavs) all = all && positive_derivative(grad, cav);
    hits += all ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

}  // namespace copronn
