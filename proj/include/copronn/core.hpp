#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "copronn/error.hpp"

namespace copronn {

/// A D-dimensional feature vector f(x). Entries are always finite.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values);
  EmbeddingVector(std::initializer_list<double> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  Eigen::Map<const Eigen::VectorXd> view() const {
    return {values_.data(), static_cast<Eigen::Index>(values_.size())};
  }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

using Embeddings = std::vector<EmbeddingVector>;

/// Prototype set for one concept (Omega_j). `index` is 0-based.
struct ConceptSet {
  std::size_t index = 0;
  std::string name;
  std::optional<std::string> prompt;
  Embeddings embeddings;

  std::size_t size() const noexcept { return embeddings.size(); }
  friend bool operator==(const ConceptSet&, const ConceptSet&) = default;
};

/// Random counterexample pool (Omega_{m+1}).
struct RandomPool {
  Embeddings embeddings;
  std::string source;

  std::size_t size() const noexcept { return embeddings.size(); }
  friend bool operator==(const RandomPool&, const RandomPool&) = default;
};

enum class Metric { Euclidean, Cosine };

struct ThresholdSelection {
  friend bool operator==(const ThresholdSelection&, const ThresholdSelection&) = default;
};
struct TopNSelection {
  std::size_t n = 1;
  friend bool operator==(const TopNSelection&, const TopNSelection&) = default;
};
using SelectionMode = std::variant<ThresholdSelection, TopNSelection>;

struct HyperParams {
  std::size_t k = 10;
  double t = 0.4;
  std::size_t alpha = 100;
  std::size_t beta = 30;
  std::uint64_t seed = 0;
  SelectionMode selection_mode = ThresholdSelection{};
  Metric metric = Metric::Euclidean;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

/// Checks ranges that do not depend on the data (k >= 1, t in (0,1], ...).
void validate_params(const HyperParams& params);

/// Checks the data-dependent invariants: beta < pool size and
/// k <= beta + sum of prototype counts.
void validate_params(const HyperParams& params, std::span<const ConceptSet> concepts,
                     const RandomPool& pool);

/// s x (m+1) relevance matrix P. The last column is the random set.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::vector<std::string> sample_ids, std::vector<std::string> concept_ids);

  static constexpr std::string_view kRandomColumn = "random";

  std::size_t rows() const noexcept { return sample_ids_.size(); }
  std::size_t cols() const noexcept { return concept_ids_.size() + 1; }
  std::size_t concept_count() const noexcept { return concept_ids_.size(); }

  double& at(std::size_t row, std::size_t col) { return scores_[row * cols() + col]; }
  double at(std::size_t row, std::size_t col) const { return scores_[row * cols() + col]; }

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(scores_).subspan(r * cols(), cols());
  }
  std::span<double> row(std::size_t r) { return std::span<double>(scores_).subspan(r * cols(), cols()); }
  /// Row restricted to the m concept columns.
  std::span<const double> concept_row(std::size_t r) const { return row(r).first(concept_count()); }

  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  const std::vector<std::string>& concept_ids() const noexcept { return concept_ids_; }
  const std::vector<double>& data() const noexcept { return scores_; }

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  std::vector<std::string> sample_ids_;
  std::vector<std::string> concept_ids_;
  std::vector<double> scores_;
};

/// Largest |row sum - 1| over all rows, taken across all m+1 columns.
double max_row_sum_error(const ScoreMatrix& matrix);

struct Explanation {
  std::string sample_id;
  std::optional<std::string> predicted_class;
  std::vector<std::size_t> relevant;  // ascending concept indices
  std::vector<std::size_t> absent;    // ascending complement of `relevant`
  std::vector<double> scores;         // full row, m+1 entries
  std::string rendered;

  friend bool operator==(const Explanation&, const Explanation&) = default;
};

/// Binary m-vector naming the concepts that define a class.
class GroundTruthConceptVector {
 public:
  GroundTruthConceptVector(std::string class_name, std::vector<std::uint8_t> bits);

  const std::string& class_name() const noexcept { return class_name_; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  std::vector<double> as_reals() const;

  friend bool operator==(const GroundTruthConceptVector&, const GroundTruthConceptVector&) = default;

 private:
  std::string class_name_;
  std::vector<std::uint8_t> bits_;
};

/// Dense classification layer: logits = weights * a + biases.
class LinearHead {
 public:
  LinearHead() = default;
  LinearHead(Eigen::MatrixXd weights, Eigen::VectorXd biases);

  std::size_t classes() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(weights_.cols()); }
  const Eigen::MatrixXd& weights() const noexcept { return weights_; }
  const Eigen::VectorXd& biases() const noexcept { return biases_; }
  Eigen::VectorXd class_weights(std::size_t k) const { return weights_.row(static_cast<Eigen::Index>(k)).transpose(); }

  Eigen::VectorXd logits(const EmbeddingVector& a) const;
  std::size_t predict(const EmbeddingVector& a) const;

  friend bool operator==(const LinearHead& a, const LinearHead& b) {
    return a.weights_ == b.weights_ && a.biases_ == b.biases_;
  }

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd biases_;
};

/// Succeeds iff every vector shares one dimension. Empty inputs are fine.
void validate_dimensions(std::span<const ConceptSet> concepts, const RandomPool& pool,
                         std::span<const EmbeddingVector> samples);

/// Returns the shared dimension of `vectors`, or `expected` if empty.
std::size_t common_dimension(std::span<const EmbeddingVector> vectors, std::optional<std::size_t> expected,
                             std::string_view location);

}  // namespace copronn
