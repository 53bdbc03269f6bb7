#include "copronn/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace copronn {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::TruncatedPayload: return "TruncatedPayload";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::PartitionTooLarge: return "PartitionTooLarge";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::ZeroLogit: return "ZeroLogit";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::UnknownClass: return "UnknownClass";
    case ErrorKind::ClassSetMismatch: return "ClassSetMismatch";
    case ErrorKind::SpecError: return "SpecError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

namespace {

void require_finite(std::span<const double> values, std::string_view what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(ErrorKind::NonFiniteValue, std::string(what) + " entry " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  require_finite(values_, "embedding");
}

EmbeddingVector::EmbeddingVector(std::initializer_list<double> values)
    : EmbeddingVector(std::vector<double>(values)) {}

void validate_params(const HyperParams& params) {
  if (params.k == 0) fail(ErrorKind::PreconditionFailed, "k must be a positive integer");
  if (!(params.t > 0.0 && params.t <= 1.0)) {
    fail(ErrorKind::PreconditionFailed, "threshold t must lie in (0, 1], got " + std::to_string(params.t));
  }
  if (params.alpha == 0) fail(ErrorKind::PreconditionFailed, "alpha must be a positive integer");
  if (params.beta == 0) fail(ErrorKind::PreconditionFailed, "beta must be a positive integer");
  if (const auto* top = std::get_if<TopNSelection>(&params.selection_mode); top && top->n == 0) {
    fail(ErrorKind::PreconditionFailed, "top-n selection needs n >= 1");
  }
}

void validate_params(const HyperParams& params, std::span<const ConceptSet> concepts, const RandomPool& pool) {
  validate_params(params);
  if (params.beta >= pool.size()) {
    fail(ErrorKind::PartitionTooLarge, "beta (" + std::to_string(params.beta) + ") must be smaller than the random pool (" +
                                           std::to_string(pool.size()) + ")");
  }
  std::size_t fitted = params.beta;
  for (const auto& c : concepts) fitted += c.size();
  if (params.k > fitted) {
    fail(ErrorKind::PreconditionFailed, "k (" + std::to_string(params.k) + ") exceeds the number of fitted points (" +
                                            std::to_string(fitted) + ")");
  }
}

ScoreMatrix::ScoreMatrix(std::vector<std::string> sample_ids, std::vector<std::string> concept_ids)
    : sample_ids_(std::move(sample_ids)),
      concept_ids_(std::move(concept_ids)),
      scores_(sample_ids_.size() * (concept_ids_.size() + 1), 0.0) {}

double max_row_sum_error(const ScoreMatrix& matrix) {
  double worst = 0.0;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    double sum = 0.0;
    for (double v : matrix.row(r)) sum += v;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

GroundTruthConceptVector::GroundTruthConceptVector(std::string class_name, std::vector<std::uint8_t> bits)
    : class_name_(std::move(class_name)), bits_(std::move(bits)) {
  bool any = false;
  for (auto b : bits_) {
    if (b > 1) fail(ErrorKind::SchemaError, "class '" + class_name_ + "' has a non-binary bit");
    any = any || b == 1;
  }
  if (!any) fail(ErrorKind::SchemaError, "class '" + class_name_ + "' must have at least one defining concept");
}

std::vector<double> GroundTruthConceptVector::as_reals() const { return {bits_.begin(), bits_.end()}; }

LinearHead::LinearHead(Eigen::MatrixXd weights, Eigen::VectorXd biases)
    : weights_(std::move(weights)), biases_(std::move(biases)) {
  if (biases_.size() != weights_.rows()) {
    fail(ErrorKind::DimensionMismatch, "linear head has " + std::to_string(weights_.rows()) + " weight rows but " +
                                           std::to_string(biases_.size()) + " biases");
  }
  if (!weights_.allFinite() || !biases_.allFinite()) {
    fail(ErrorKind::NonFiniteValue, "linear head contains non-finite entries");
  }
}

Eigen::VectorXd LinearHead::logits(const EmbeddingVector& a) const {
  if (a.dim() != dim()) {
    fail(ErrorKind::DimensionMismatch, "head expects dim " + std::to_string(dim()) + ", got " + std::to_string(a.dim()));
  }
  return weights_ * a.view() + biases_;
}

std::size_t LinearHead::predict(const EmbeddingVector& a) const {
  Eigen::Index best = 0;
  logits(a).maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

std::size_t common_dimension(std::span<const EmbeddingVector> vectors, std::optional<std::size_t> expected,
                             std::string_view location) {
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (!expected) {
      expected = vectors[i].dim();
    } else if (vectors[i].dim() != *expected) {
      fail(ErrorKind::DimensionMismatch, "expected dim " + std::to_string(*expected) + ", found " +
                                             std::to_string(vectors[i].dim()) + " at " + std::string(location) +
                                             "[" + std::to_string(i) + "]");
    }
  }
  return expected.value_or(0);
}

void validate_dimensions(std::span<const ConceptSet> concepts, const RandomPool& pool,
                         std::span<const EmbeddingVector> samples) {
  std::optional<std::size_t> dim;
  auto absorb = [&](std::span<const EmbeddingVector> vs, const std::string& where) {
    if (vs.empty()) return;
    dim = common_dimension(vs, dim, where);
  };
  for (const auto& c : concepts) absorb(c.embeddings, "concept '" + c.name + "'");
  absorb(pool.embeddings, "random pool");
  absorb(samples, "samples");
}

}  // namespace copronn
