#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "copronn/core.hpp"
#include "copronn/logistic.hpp"

namespace copronn {

/// One unit-norm logistic normal q_j per concept, stored as matrix columns.
struct ConceptBasis {
  Eigen::MatrixXd vectors;  // D x m

  std::size_t size() const noexcept { return static_cast<std::size_t>(vectors.cols()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(vectors.rows()); }
  Eigen::VectorXd vector(std::size_t j) const { return vectors.col(static_cast<Eigen::Index>(j)); }
};

/// w_k = sum_j s_j q_j + r, with s_j >= 0.
struct ClassDecomposition {
  std::size_t class_index = 0;
  Eigen::VectorXd class_weights;          // w_k
  std::vector<double> coefficients;       // s_j, zero for unselected concepts
  Eigen::VectorXd residual;               // r
  std::vector<std::size_t> selected;      // in selection order
};

/// Concept j's vector is fit against `negatives` with seed derive_seed(seed, j).
ConceptBasis fit_concept_basis(std::span<const ConceptSet> concepts, std::span<const EmbeddingVector> negatives,
                               std::uint64_t seed, const LogisticOptions& options = {});

/// Greedy nonnegative pursuit: each step adds the basis vector whose inclusion
/// (with an NNLS refit over everything selected) leaves the smallest residual.
/// Stops after `max_components` steps or when no candidate shrinks ||r||.
ClassDecomposition decompose_class(const Eigen::VectorXd& class_weights, const ConceptBasis& basis,
                                   std::size_t max_components, std::size_t class_index = 0);

/// score_j = s_j q_j.a / (w_k.a). Throws ZeroLogit when |w_k.a| < 1e-12.
std::vector<double> ibd_sample_scores(const EmbeddingVector& a, const ClassDecomposition& decomposition,
                                      const ConceptBasis& basis);

/// (r.a) / (w_k.a), the part of the normalized logit no concept explains.
double ibd_residual_term(const EmbeddingVector& a, const ClassDecomposition& decomposition);

std::vector<double> clamp_negative_scores(std::span<const double> scores);

/// Class-level share of concept j: s_j (q_j.w_k) / ||w_k||^2.
std::vector<double> ibd_class_scores(const ClassDecomposition& decomposition, const ConceptBasis& basis);

}  // namespace copronn
