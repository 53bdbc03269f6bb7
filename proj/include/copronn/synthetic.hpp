#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "copronn/embedding_store.hpp"
#include "copronn/serialization.hpp"

namespace copronn {

struct SyntheticConcept {
  std::string name;
  std::optional<std::string> prompt;
  std::optional<double> sigma;               // overrides SyntheticSpec::sigma
  std::optional<std::vector<double>> mean;   // normalized on use; drawn orthogonal to earlier means when absent
};

struct SyntheticClass {
  std::string name;
  std::vector<std::uint8_t> bits;
};

/// Concept-structured Gaussian clusters.
///
/// Prototypes of concept j are mean_j + sigma_j * N(0, I). A sample of a class
/// is normalize(sum of its concepts' means) + sample_sigma * N(0, I). Random
/// pool points are pool_radius * u for isotropic unit directions u whose cosine
/// with every concept mean is at most pool_max_cosine.
struct SyntheticSpec {
  std::size_t dim = 16;
  std::vector<SyntheticConcept> concepts;
  std::vector<SyntheticClass> classes;
  double sigma = 0.1;
  std::optional<double> sample_sigma;  // defaults to sigma
  std::size_t prototypes_per_concept = 30;
  std::size_t pool_size = 1000;
  double pool_radius = 1.0;
  double pool_max_cosine = 0.3;
  std::size_t samples_per_class = 40;
  std::uint64_t seed = 0;
  std::optional<HyperParams> hyperparams;  // default: k=10, alpha=100, beta=30, t=(1/k)ceil(k/m)
  BaselineParams baselines;
};

/// Throws SpecError on malformed or inconsistent input.
SyntheticSpec parse_synthetic_spec(const Json& doc);
Json synthetic_spec_to_json(const SyntheticSpec& spec);

void validate_synthetic_spec(const SyntheticSpec& spec);

/// Draws the whole corpus from one seeded stream. The returned manifest also
/// carries labeled samples and a centered nearest-centroid head
/// (w_k = c_k - mean_c c_c, zero bias, c_k the unit class direction).
Manifest generate_corpus(const SyntheticSpec& spec);

/// Five classes over the concepts (fuzzy orange, fuzzy yellow, shiny brown)
/// with bit patterns [1,0,1], [0,0,1], [1,0,0], [0,1,0], [1,1,0].
SyntheticSpec wild_bee_spec(double sigma, std::uint64_t seed);

}  // namespace copronn
