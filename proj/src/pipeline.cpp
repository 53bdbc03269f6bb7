#include "copronn/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "copronn/random.hpp"

namespace copronn {

const SampleSet& require_samples(const Manifest& manifest) {
  if (!manifest.samples || manifest.samples->size() == 0) {
    fail(ErrorKind::SchemaError, "manifest has no labeled samples block");
  }
  return *manifest.samples;
}

const LinearHead& require_head(const Manifest& manifest) {
  if (!manifest.head) fail(ErrorKind::SchemaError, "the TCAV and IBD baselines need a 'head' block in the manifest");
  return *manifest.head;
}

ScoreMatrix run_copronn_scores(const Manifest& manifest, std::span<const EmbeddingVector> samples,
                               std::vector<std::string> sample_ids) {
  return score_matrix(manifest.concepts, manifest.pool, samples, manifest.params, std::move(sample_ids));
}

MethodPredictions run_copronn(const Manifest& manifest) {
  const auto& samples = require_samples(manifest);
  const auto P = run_copronn_scores(manifest, samples.embeddings, samples.ids);
  MethodPredictions out;
  out.method = kMethodCoPronn;
  out.sample_ids = samples.ids;
  out.labels = samples.labels;
  for (std::size_t i = 0; i < P.rows(); ++i) {
    const auto row = P.concept_row(i);
    out.rows.emplace_back(row.begin(), row.end());
  }
  return out;
}

BaselineFits fit_baselines(const Manifest& manifest, const LogisticOptions& options) {
  validate_dimensions(manifest.concepts, manifest.pool, {});
  const std::uint64_t base = derive_seed(manifest.params.seed, kStreamBaselinePartitions);
  BaselineFits fits;
  fits.partitions = sample_partitions(manifest.pool.size(), manifest.baselines.alpha, manifest.baselines.beta, base);
  fits.bases.resize(fits.partitions.size());

  // partitions are independent; each worker writes only its own slot
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t a = next++; a < fits.partitions.size(); a = next++) {
      try {
        Embeddings negatives;
        negatives.reserve(fits.partitions[a].size());
        for (auto idx : fits.partitions[a]) negatives.push_back(manifest.pool.embeddings[idx]);
        fits.bases[a] = fit_concept_basis(manifest.concepts, negatives, derive_seed(base, 1000 + a), options);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, fits.partitions.size()));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (error) std::rethrow_exception(error);
  return fits;
}

std::vector<CAV> cavs_for_concept(const BaselineFits& fits, std::size_t concept_index) {
  std::vector<CAV> cavs;
  for (std::size_t a = 0; a < fits.bases.size(); ++a) {
    CAV cav;
    cav.concept_index = concept_index;
    cav.partition_index = a;
    cav.vector = fits.bases[a].vector(concept_index);
    cavs.push_back(std::move(cav));
  }
  return cavs;
}

namespace {

std::vector<std::vector<EmbeddingVector>> group_by_class(const Manifest& manifest, const SampleSet& samples) {
  std::vector<std::vector<EmbeddingVector>> groups(manifest.classes.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    groups[manifest.class_index(samples.labels[i])].push_back(samples.embeddings[i]);
  }
  return groups;
}

}  // namespace

MethodPredictions run_tcav(const Manifest& manifest, const BaselineFits& fits) {
  const auto& samples = require_samples(manifest);
  const auto oracle = linear_head_oracle(require_head(manifest));
  const std::size_t m = manifest.concept_count();

  std::vector<std::vector<CAV>> cavs;
  for (std::size_t j = 0; j < m; ++j) cavs.push_back(cavs_for_concept(fits, j));

  MethodPredictions out;
  out.method = kMethodTcav;
  out.sample_ids = samples.ids;
  out.labels = samples.labels;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto k = manifest.class_index(samples.labels[i]);
    std::vector<double> row(m);
    for (std::size_t j = 0; j < m; ++j) row[j] = tcav_sample_score(samples.embeddings[i], k, cavs[j], oracle);
    out.rows.push_back(std::move(row));
  }

  const auto groups = group_by_class(manifest, samples);
  for (std::size_t k = 0; k < manifest.classes.size(); ++k) {
    std::vector<double> scores(m, 0.0);
    if (!groups[k].empty()) {
      for (std::size_t j = 0; j < m; ++j) scores[j] = tcav_class_score(groups[k], k, cavs[j], oracle);
    }
    out.class_scores.push_back(std::move(scores));
  }
  return out;
}

MethodPredictions run_ibd(const Manifest& manifest, const BaselineFits& fits) {
  const auto& samples = require_samples(manifest);
  const auto& head = require_head(manifest);
  const std::size_t m = manifest.concept_count();
  const std::size_t classes = manifest.classes.size();
  if (head.classes() != classes) fail(ErrorKind::SchemaError, "head rows must match the class list");

  std::vector<std::vector<double>> raw(samples.size(), std::vector<double>(m, 0.0));
  std::vector<std::vector<double>> class_scores(classes, std::vector<double>(m, 0.0));
  for (const auto& basis : fits.bases) {
    std::vector<ClassDecomposition> decompositions;
    for (std::size_t k = 0; k < classes; ++k) {
      decompositions.push_back(decompose_class(head.class_weights(k), basis, m, k));
      const auto shares = ibd_class_scores(decompositions.back(), basis);
      for (std::size_t j = 0; j < m; ++j) class_scores[k][j] += shares[j];
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto k = manifest.class_index(samples.labels[i]);
      const auto scores = ibd_sample_scores(samples.embeddings[i], decompositions[k], basis);
      for (std::size_t j = 0; j < m; ++j) raw[i][j] += scores[j];
    }
  }

  const auto alpha = static_cast<double>(fits.bases.size());
  MethodPredictions out;
  out.method = kMethodIbd;
  out.sample_ids = samples.ids;
  out.labels = samples.labels;
  for (auto& row : raw) {
    for (double& v : row) v /= alpha;
    out.rows.push_back(clamp_negative_scores(row));
  }
  for (auto& row : class_scores) {
    for (double& v : row) v /= alpha;
  }
  out.class_scores = std::move(class_scores);
  return out;
}

}  // namespace copronn
