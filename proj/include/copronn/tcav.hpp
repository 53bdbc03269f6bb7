#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "copronn/core.hpp"
#include "copronn/logistic.hpp"

namespace copronn {

/// Unit normal of a concept-vs-random linear separator, pointing towards the concept.
struct CAV {
  std::size_t concept_index = 0;
  std::size_t partition_index = 0;
  Eigen::VectorXd vector;
  double accuracy = 0.0;
};

/// Gradient of logit k with respect to the embedding, evaluated at `sample`.
using GradientOracle = std::function<Eigen::VectorXd(const EmbeddingVector& sample, std::size_t class_index)>;

/// For a dense head the gradient is the class weight vector, so per-sample
/// TCAV scores are constant within a class.
GradientOracle linear_head_oracle(LinearHead head);

CAV fit_cav(const ConceptSet& concept_set, std::span<const EmbeddingVector> negatives, std::uint64_t seed,
            const LogisticOptions& options = {});

/// Fraction of `cavs` whose directional derivative is strictly positive.
double tcav_sample_score(const EmbeddingVector& sample, std::size_t class_index, std::span<const CAV> cavs,
                         const GradientOracle& oracle);

/// Fraction of samples whose directional derivative is positive for every CAV.
double tcav_class_score(std::span<const EmbeddingVector> samples, std::size_t class_index, std::span<const CAV> cavs,
                        const GradientOracle& oracle);

}  // namespace copronn
