#pragma once

// On-disk formats.
//
// Embedding file (all integers and floats little-endian):
//   offset 0   char[8]  magic "COPROEMB"
//   offset 8   u16      version (1)
//   offset 10  u32      dim
//   offset 14  u64      count
//   offset 22  f32[count * dim], row-major
// The file length is exactly 22 + 4 * count * dim bytes.
//
// The manifest is a JSON document; see docs/formats.md.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copronn/core.hpp"

namespace copronn {

inline constexpr std::string_view kEmbeddingMagic = "COPROEMB";
inline constexpr std::uint16_t kEmbeddingVersion = 1;
inline constexpr std::size_t kEmbeddingHeaderSize = 8 + 2 + 4 + 8;

/// Encodes vectors into the embedding file layout. `dim` is required when
/// `vectors` is empty; otherwise it must match (or be omitted).
std::vector<std::byte> encode_embeddings(std::span<const EmbeddingVector> vectors,
                                         std::optional<std::size_t> dim = std::nullopt);

struct DecodedEmbeddings {
  std::size_t dim = 0;
  Embeddings vectors;
};

DecodedEmbeddings decode_embeddings(std::span<const std::byte> bytes);

Embeddings read_embedding_file(const std::filesystem::path& path);
DecodedEmbeddings read_embedding_file_with_dim(const std::filesystem::path& path);
void write_embedding_file(const std::filesystem::path& path, std::span<const EmbeddingVector> vectors,
                          std::optional<std::size_t> dim = std::nullopt);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path);

/// Labeled evaluation samples, flattened in manifest order.
struct SampleSet {
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  Embeddings embeddings;

  std::size_t size() const noexcept { return embeddings.size(); }
  friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

/// Partitioning used by the TCAV and IBD baselines.
struct BaselineParams {
  std::size_t alpha = 30;
  std::size_t beta = 500;
  friend bool operator==(const BaselineParams&, const BaselineParams&) = default;
};

struct Manifest {
  std::size_t dim = 0;
  std::vector<ConceptSet> concepts;
  RandomPool pool;
  std::vector<GroundTruthConceptVector> classes;
  HyperParams params;
  BaselineParams baselines;
  std::optional<SampleSet> samples;
  std::optional<LinearHead> head;  // rows aligned with `classes`

  std::size_t concept_count() const noexcept { return concepts.size(); }
  std::vector<std::string> concept_names() const;
  /// Index of `name` in `classes`; throws UnknownClass.
  std::size_t class_index(std::string_view name) const;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// Loads the manifest and every embedding file it references (paths are
/// relative to the manifest's directory). All vectors are checked against one
/// dimension.
Manifest load_manifest(const std::filesystem::path& path);

/// Writes `manifest` as manifest.json plus one embedding file per referenced
/// set into `dir`. Returns the manifest path.
std::filesystem::path save_manifest(const std::filesystem::path& dir, const Manifest& manifest);

}  // namespace copronn
