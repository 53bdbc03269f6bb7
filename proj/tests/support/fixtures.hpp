#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "copronn/core.hpp"
#include "copronn/random.hpp"
#include "copronn/synthetic.hpp"

namespace copronn::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

EmbeddingVector random_vector(Rng& rng, std::size_t dim, double scale = 1.0);
Embeddings random_vectors(Rng& rng, std::size_t count, std::size_t dim, double scale = 1.0);

ConceptSet make_concept(std::size_t index, std::string name, Embeddings embeddings);

/// Wild-bee-shaped corpus with mildly overlapping clusters.
SyntheticSpec bee_overlap_spec();

/// Wild-bee-shaped corpus whose concept clusters have very different spreads.
SyntheticSpec bee_heterogeneous_spec();

std::string read_text(const std::filesystem::path& path);

}  // namespace copronn::testing
