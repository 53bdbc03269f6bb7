#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "copronn/core.hpp"

namespace copronn {

/// Exact kNN index over the prototype sets plus one random partition.
///
/// Points are stored in insertion order: all of concept 0, concept 1, ...,
/// then the partition's random points in ascending pool index. Tag j < m marks
/// concept j; tag m marks the random set. Equal distances are resolved in
/// favour of the lower insertion index.
class FittedIndex {
 public:
  FittedIndex(std::span<const ConceptSet> concepts, const RandomPool& pool, std::span<const std::size_t> partition,
              std::size_t k, Metric metric = Metric::Euclidean);

  std::size_t size() const noexcept { return tags_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t set_count() const noexcept { return set_count_; }
  Metric metric() const noexcept { return metric_; }
  std::span<const std::size_t> tags() const noexcept { return tags_; }
  std::span<const double> point(std::size_t i) const {
    return std::span<const double>(points_).subspan(i * dim_, dim_);
  }

  /// Insertion indices of the k nearest points, nearest first.
  std::vector<std::size_t> neighbors(const EmbeddingVector& query) const;

  /// Entry j is the fraction of the k nearest points tagged j (m+1 entries).
  std::vector<double> scores(const EmbeddingVector& query) const;

 private:
  double distance(std::span<const double> query, double query_norm, std::size_t i) const;

  std::size_t dim_ = 0;
  std::size_t k_ = 0;
  std::size_t set_count_ = 0;
  Metric metric_ = Metric::Euclidean;
  std::vector<double> points_;
  std::vector<double> norms_;
  std::vector<std::size_t> tags_;
};

/// Draws `alpha` partitions of `beta` distinct pool indices each (sorted
/// ascending). Draws are independent across partitions; the result depends
/// only on the arguments.
std::vector<std::vector<std::size_t>> sample_partitions(std::size_t pool_size, std::size_t alpha, std::size_t beta,
                                                        std::uint64_t seed);

inline std::vector<double> knn_scores_one_partition(const FittedIndex& index, const EmbeddingVector& query) {
  return index.scores(query);
}

/// Relevance matrix averaged over `params.alpha` random partitions.
ScoreMatrix score_matrix(std::span<const ConceptSet> concepts, const RandomPool& pool,
                         std::span<const EmbeddingVector> samples, const HyperParams& params,
                         std::vector<std::string> sample_ids = {});

/// Relevant concept indices (ascending) for a row of m concept scores.
std::vector<std::size_t> select_relevant(std::span<const double> concept_scores, const HyperParams& params);

/// (1/k) * ceil(k/m)
double default_threshold(std::size_t k, std::size_t m);

std::string render_explanation(const Explanation& explanation, std::string_view class_name,
                               std::span<const std::string> concept_names);

/// Builds the explanation record for row `row` of `scores`.
Explanation explain_row(const ScoreMatrix& scores, std::size_t row, const HyperParams& params,
                        std::optional<std::string> predicted_class);

}  // namespace copronn
