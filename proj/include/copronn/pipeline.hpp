#pragma once

// End-to-end runs of CoProNN and the two baselines over a loaded manifest.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "copronn/embedding_store.hpp"
#include "copronn/ibd.hpp"
#include "copronn/knn_explainer.hpp"
#include "copronn/tcav.hpp"

namespace copronn {

inline constexpr std::string_view kMethodCoPronn = "CoProNN";
inline constexpr std::string_view kMethodTcav = "TCAV";
inline constexpr std::string_view kMethodIbd = "IBD";

/// Per-sample concept relevance vectors (m entries each) from one method.
struct MethodPredictions {
  std::string method;
  std::vector<std::string> sample_ids;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  /// Optional class-level scores [class][concept] (TCAV class score, IBD
  /// class share); empty for CoProNN.
  std::vector<std::vector<double>> class_scores;
};

/// Concept normals fitted once per baseline partition; shared by TCAV (as CAVs)
/// and IBD (as the concept basis) because both use the same trainer and data.
struct BaselineFits {
  std::vector<std::vector<std::size_t>> partitions;
  std::vector<ConceptBasis> bases;  // one per partition
};

BaselineFits fit_baselines(const Manifest& manifest, const LogisticOptions& options = {});

std::vector<CAV> cavs_for_concept(const BaselineFits& fits, std::size_t concept_index);

const SampleSet& require_samples(const Manifest& manifest);
const LinearHead& require_head(const Manifest& manifest);

ScoreMatrix run_copronn_scores(const Manifest& manifest, std::span<const EmbeddingVector> samples,
                               std::vector<std::string> sample_ids = {});

MethodPredictions run_copronn(const Manifest& manifest);
MethodPredictions run_tcav(const Manifest& manifest, const BaselineFits& fits);
/// Raw IBD scores averaged over partitions, then negative entries clamped to 0.
MethodPredictions run_ibd(const Manifest& manifest, const BaselineFits& fits);

}  // namespace copronn
