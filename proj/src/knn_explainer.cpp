#include "copronn/knn_explainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "copronn/random.hpp"

namespace copronn {

FittedIndex::FittedIndex(std::span<const ConceptSet> concepts, const RandomPool& pool,
                         std::span<const std::size_t> partition, std::size_t k, Metric metric)
    : k_(k), set_count_(concepts.size() + 1), metric_(metric) {
  if (k == 0) fail(ErrorKind::PreconditionFailed, "k must be positive");
  std::optional<std::size_t> dim;
  auto add = [&](const EmbeddingVector& v, std::size_t tag) {
    if (!dim) dim = v.dim();
    if (v.dim() != *dim) {
      fail(ErrorKind::DimensionMismatch,
           "index expects dim " + std::to_string(*dim) + ", got " + std::to_string(v.dim()));
    }
    points_.insert(points_.end(), v.values().begin(), v.values().end());
    norms_.push_back(v.view().norm());
    tags_.push_back(tag);
  };
  for (std::size_t j = 0; j < concepts.size(); ++j) {
    for (const auto& v : concepts[j].embeddings) add(v, j);
  }
  for (std::size_t idx : partition) {
    if (idx >= pool.size()) fail(ErrorKind::PreconditionFailed, "partition index out of range");
    add(pool.embeddings[idx], concepts.size());
  }
  dim_ = dim.value_or(0);
  if (tags_.size() < k_) {
    fail(ErrorKind::PreconditionFailed, "index holds " + std::to_string(tags_.size()) + " points, fewer than k = " +
                                            std::to_string(k_));
  }
}

double FittedIndex::distance(std::span<const double> query, double query_norm, std::size_t i) const {
  const auto p = point(i);
  if (metric_ == Metric::Euclidean) {
    double sum = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const double diff = query[d] - p[d];
      sum += diff * diff;
    }
    return sum;
  }
  double dot = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) dot += query[d] * p[d];
  const double denom = query_norm * norms_[i];
  return denom > 0.0 ? 1.0 - dot / denom : 1.0;
}

std::vector<std::size_t> FittedIndex::neighbors(const EmbeddingVector& query) const {
  if (query.dim() != dim_) {
    fail(ErrorKind::DimensionMismatch, "query has dim " + std::to_string(query.dim()) + ", index has " +
                                           std::to_string(dim_));
  }
  const double query_norm = metric_ == Metric::Cosine ? query.view().norm() : 0.0;
  std::vector<double> dist(size());
  for (std::size_t i = 0; i < size(); ++i) dist[i] = distance(query.values(), query_norm, i);

  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto closer = [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_), order.end(), closer);
  order.resize(k_);
  return order;
}

std::vector<double> FittedIndex::scores(const EmbeddingVector& query) const {
  std::vector<std::size_t> counts(set_count_, 0);
  for (std::size_t i : neighbors(query)) ++counts[tags_[i]];
  std::vector<double> out(set_count_);
  for (std::size_t j = 0; j < set_count_; ++j) out[j] = static_cast<double>(counts[j]) / static_cast<double>(k_);
  return out;
}

std::vector<std::vector<std::size_t>> sample_partitions(std::size_t pool_size, std::size_t alpha, std::size_t beta,
                                                        std::uint64_t seed) {
  if (alpha == 0) fail(ErrorKind::PreconditionFailed, "alpha must be >= 1");
  if (beta >= pool_size) {
    fail(ErrorKind::PartitionTooLarge, "beta = " + std::to_string(beta) + " but the pool holds " +
                                           std::to_string(pool_size) + " vectors");
  }
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> partitions;
  partitions.reserve(alpha);
  std::vector<std::size_t> scratch(pool_size);
  for (std::size_t a = 0; a < alpha; ++a) {
    std::iota(scratch.begin(), scratch.end(), std::size_t{0});
    // partial Fisher-Yates: the first beta slots become the draw
    for (std::size_t i = 0; i < beta; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_index(rng, pool_size - i));
      std::swap(scratch[i], scratch[j]);
    }
    std::vector<std::size_t> part(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(beta));
    std::sort(part.begin(), part.end());
    partitions.push_back(std::move(part));
  }
  return partitions;
}

ScoreMatrix score_matrix(std::span<const ConceptSet> concepts, const RandomPool& pool,
                         std::span<const EmbeddingVector> samples, const HyperParams& params,
                         std::vector<std::string> sample_ids) {
  validate_dimensions(concepts, pool, samples);
  validate_params(params, concepts, pool);
  if (sample_ids.empty()) {
    for (std::size_t i = 0; i < samples.size(); ++i) sample_ids.push_back(std::to_string(i));
  }
  if (sample_ids.size() != samples.size()) fail(ErrorKind::PreconditionFailed, "one id per sample is required");

  std::vector<std::string> names;
  for (const auto& c : concepts) names.push_back(c.name);
  ScoreMatrix P(std::move(sample_ids), std::move(names));

  for (const auto& partition : sample_partitions(pool.size(), params.alpha, params.beta, params.seed)) {
    const FittedIndex index(concepts, pool, partition, params.k, params.metric);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto row = index.scores(samples[i]);
      auto target = P.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) target[j] += row[j];
    }
  }
  const auto alpha = static_cast<double>(params.alpha);
  for (std::size_t i = 0; i < P.rows(); ++i) {
    for (double& v : P.row(i)) v /= alpha;
  }
  return P;
}

std::vector<std::size_t> select_relevant(std::span<const double> concept_scores, const HyperParams& params) {
  std::vector<std::size_t> out;
  if (const auto* top = std::get_if<TopNSelection>(&params.selection_mode)) {
    std::vector<std::size_t> order(concept_scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return concept_scores[a] > concept_scores[b]; });
    order.resize(std::min(top->n, order.size()));
    std::sort(order.begin(), order.end());
    return order;
  }
  for (std::size_t j = 0; j < concept_scores.size(); ++j) {
    if (concept_scores[j] >= params.t) out.push_back(j);
  }
  return out;
}

double default_threshold(std::size_t k, std::size_t m) {
  if (k == 0 || m == 0) fail(ErrorKind::PreconditionFailed, "default_threshold needs k >= 1 and m >= 1");
  const std::size_t ceil_km = (k + m - 1) / m;
  return static_cast<double>(ceil_km) / static_cast<double>(k);
}

namespace {

std::string join_names(std::span<const std::size_t> indices, std::span<const std::string> names) {
  std::string out;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0) out += ", ";
    out += names[indices[i]];
  }
  return out;
}

}  // namespace

std::string render_explanation(const Explanation& e, std::string_view class_name,
                               std::span<const std::string> concept_names) {
  for (auto j : e.relevant) {
    if (j >= concept_names.size()) fail(ErrorKind::PreconditionFailed, "relevant concept index out of range");
  }
  for (auto j : e.absent) {
    if (j >= concept_names.size()) fail(ErrorKind::PreconditionFailed, "absent concept index out of range");
  }
  auto relevant = e.relevant;
  auto absent = e.absent;
  std::sort(relevant.begin(), relevant.end());
  std::sort(absent.begin(), absent.end());

  std::string text = "This image is class " + std::string(class_name);
  if (relevant.empty()) return text + ", but no defining concept was detected.";
  text += ", because concepts " + join_names(relevant, concept_names) + " are present";
  if (!absent.empty()) text += " and concepts " + join_names(absent, concept_names) + " are absent";
  return text + ".";
}

Explanation explain_row(const ScoreMatrix& scores, std::size_t row, const HyperParams& params,
                        std::optional<std::string> predicted_class) {
  Explanation e;
  e.sample_id = scores.sample_ids().at(row);
  e.predicted_class = std::move(predicted_class);
  e.scores.assign(scores.row(row).begin(), scores.row(row).end());
  e.relevant = select_relevant(scores.concept_row(row), params);
  for (std::size_t j = 0; j < scores.concept_count(); ++j) {
    if (!std::binary_search(e.relevant.begin(), e.relevant.end(), j)) e.absent.push_back(j);
  }
  e.rendered = render_explanation(e, e.predicted_class.value_or("unknown"), scores.concept_ids());
  return e;
}

}  // namespace copronn
