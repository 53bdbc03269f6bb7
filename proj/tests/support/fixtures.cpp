#include "fixtures.hpp"

#include <unistd.h>

#include <fstream>
#include <sstream>

namespace copronn::testing {

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  path_ = std::filesystem::temp_directory_path() /
          ("copronn_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

EmbeddingVector random_vector(Rng& rng, std::size_t dim, double scale) {
  std::vector<double> v(dim);
  for (auto& x : v) x = scale * standard_normal(rng);
  return EmbeddingVector(std::move(v));
}

Embeddings random_vectors(Rng& rng, std::size_t count, std::size_t dim, double scale) {
  Embeddings out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_vector(rng, dim, scale));
  return out;
}

ConceptSet make_concept(std::size_t index, std::string name, Embeddings embeddings) {
  ConceptSet c;
  c.index = index;
  c.name = std::move(name);
  c.embeddings = std::move(embeddings);
  return c;
}

SyntheticSpec bee_overlap_spec() {
  auto spec = wild_bee_spec(0.15, 2024);
  spec.samples_per_class = 40;
  spec.baselines = {30, 500};
  return spec;
}

SyntheticSpec bee_heterogeneous_spec() {
  auto spec = wild_bee_spec(0.15, 2024);
  spec.concepts[0].sigma = 0.05;
  spec.concepts[1].sigma = 0.30;
  spec.concepts[2].sigma = 0.15;
  spec.samples_per_class = 40;
  spec.baselines = {30, 500};
  return spec;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace copronn::testing
