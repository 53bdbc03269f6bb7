#include "copronn/embedding_store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>

#include "copronn/serialization.hpp"

namespace copronn {

namespace {

static_assert(std::numeric_limits<float>::is_iec559, "embedding files need IEEE-754 binary32");

template <typename T>
void put_le(std::vector<std::byte>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::byte>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::span<const std::byte> bytes, std::size_t offset) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(bytes[offset + i])) << (8 * i);
  }
  return static_cast<T>(value);
}

}  // namespace

std::vector<std::byte> encode_embeddings(std::span<const EmbeddingVector> vectors, std::optional<std::size_t> dim) {
  if (!dim && vectors.empty()) fail(ErrorKind::DimensionMismatch, "an empty embedding file needs a declared dimension");
  const std::size_t d = common_dimension(vectors, dim, "vectors");
  if (d > std::numeric_limits<std::uint32_t>::max()) fail(ErrorKind::DimensionMismatch, "dimension exceeds u32");

  std::vector<std::byte> out;
  out.reserve(kEmbeddingHeaderSize + vectors.size() * d * 4);
  for (char c : kEmbeddingMagic) out.push_back(static_cast<std::byte>(c));
  put_le<std::uint16_t>(out, kEmbeddingVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(vectors.size()));
  for (std::size_t row = 0; row < vectors.size(); ++row) {
    for (std::size_t col = 0; col < d; ++col) {
      const auto value = static_cast<float>(vectors[row][col]);
      if (!std::isfinite(value)) {
        fail(ErrorKind::NonFiniteValue, "value at row " + std::to_string(row) + ", col " + std::to_string(col) +
                                            " is not representable as a finite f32");
      }
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(value));
    }
  }
  return out;
}

DecodedEmbeddings decode_embeddings(std::span<const std::byte> bytes) {
  if (bytes.size() < kEmbeddingMagic.size() ||
      std::memcmp(bytes.data(), kEmbeddingMagic.data(), kEmbeddingMagic.size()) != 0) {
    fail(ErrorKind::BadMagic, "missing COPROEMB magic");
  }
  if (bytes.size() < kEmbeddingHeaderSize) fail(ErrorKind::TruncatedPayload, "header is truncated");
  const auto version = get_le<std::uint16_t>(bytes, 8);
  if (version != kEmbeddingVersion) fail(ErrorKind::UnsupportedVersion, "version " + std::to_string(version));
  const auto dim = get_le<std::uint32_t>(bytes, 10);
  const auto count = get_le<std::uint64_t>(bytes, 14);

  const std::uint64_t payload = bytes.size() - kEmbeddingHeaderSize;
  if (dim != 0 && count > payload / (4ULL * dim)) {
    fail(ErrorKind::TruncatedPayload, "header declares " + std::to_string(count) + " x " + std::to_string(dim) +
                                          " values but the payload holds " + std::to_string(payload) + " bytes");
  }
  if (payload != count * dim * 4ULL) {
    fail(ErrorKind::SchemaError, std::to_string(payload - count * dim * 4ULL) + " trailing bytes after payload");
  }

  DecodedEmbeddings out;
  out.dim = dim;
  out.vectors.reserve(count);
  std::size_t offset = kEmbeddingHeaderSize;
  std::vector<double> row(dim);
  for (std::uint64_t r = 0; r < count; ++r) {
    for (std::uint32_t c = 0; c < dim; ++c, offset += 4) {
      const float value = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
      if (!std::isfinite(value)) {
        fail(ErrorKind::NonFiniteValue, "value at row " + std::to_string(r) + ", col " + std::to_string(c));
      }
      row[c] = value;
    }
    out.vectors.emplace_back(row);
  }
  return out;
}

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::MissingFile, path.string());
  std::vector<char> buffer((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> out(buffer.size());
  std::memcpy(out.data(), buffer.data(), buffer.size());
  return out;
}

DecodedEmbeddings read_embedding_file_with_dim(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_embeddings(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

Embeddings read_embedding_file(const std::filesystem::path& path) {
  return read_embedding_file_with_dim(path).vectors;
}

void write_embedding_file(const std::filesystem::path& path, std::span<const EmbeddingVector> vectors,
                          std::optional<std::size_t> dim) {
  write_file_atomic(path, encode_embeddings(vectors, dim));
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::as_bytes(std::span(text.data(), text.size())));
}

std::vector<std::string> Manifest::concept_names() const {
  std::vector<std::string> names;
  for (const auto& c : concepts) names.push_back(c.name);
  return names;
}

std::size_t Manifest::class_index(std::string_view name) const {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].class_name() == name) return i;
  }
  fail(ErrorKind::UnknownClass, "class '" + std::string(name) + "' is not declared in the manifest");
}

namespace {

class ManifestLoader {
 public:
  explicit ManifestLoader(std::filesystem::path base) : base_(std::move(base)) {}

  Embeddings load(const std::string& relative, const std::string& location) {
    const auto path = base_ / relative;
    if (!std::filesystem::exists(path)) fail(ErrorKind::MissingFile, path.string() + " (referenced by " + location + ")");
    auto decoded = read_embedding_file_with_dim(path);
    if (!dim_) {
      dim_ = decoded.dim;
    } else if (decoded.dim != *dim_) {
      fail(ErrorKind::DimensionMismatch, "expected dim " + std::to_string(*dim_) + ", found " +
                                             std::to_string(decoded.dim) + " in " + location + " (" + path.string() + ")");
    }
    return std::move(decoded.vectors);
  }

  std::size_t dim() const { return dim_.value_or(0); }

 private:
  std::filesystem::path base_;
  std::optional<std::size_t> dim_;
};

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
  Json doc;
  {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::MissingFile, path.string());
    try {
      doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::SchemaError, "manifest is not valid JSON: " + std::string(e.what()));
    }
  }
  ManifestLoader loader(path.parent_path());
  Manifest m;

  const Json& concepts = require_field(doc, "concepts", "manifest");
  if (!concepts.is_array() || concepts.empty()) fail(ErrorKind::SchemaError, "manifest.concepts must be a non-empty array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    ConceptSet c;
    c.index = i;
    c.name = require_as<std::string>(concepts[i], "name", "concepts[" + std::to_string(i) + "]");
    if (!names.insert(c.name).second) fail(ErrorKind::SchemaError, "duplicate concept name '" + c.name + "'");
    if (auto it = concepts[i].find("prompt"); it != concepts[i].end() && !it->is_null()) {
      c.prompt = require_as<std::string>(concepts[i], "prompt", "concept '" + c.name + "'");
    }
    c.embeddings = loader.load(require_as<std::string>(concepts[i], "embedding_file", "concept '" + c.name + "'"),
                               "concept '" + c.name + "'");
    if (c.embeddings.empty()) fail(ErrorKind::SchemaError, "concept '" + c.name + "' has no prototypes");
    m.concepts.push_back(std::move(c));
  }

  const Json& pool = require_field(doc, "random_pool", "manifest");
  m.pool.source = require_as<std::string>(pool, "source", "random_pool");
  m.pool.embeddings = loader.load(require_as<std::string>(pool, "embedding_file", "random_pool"), "random_pool");

  const Json& classes = require_field(doc, "classes", "manifest");
  if (!classes.is_array()) fail(ErrorKind::SchemaError, "manifest.classes must be an array");
  std::set<std::string> class_names;
  for (const auto& cls : classes) {
    auto truth = ground_truth_from_json(cls);
    if (truth.bits().size() != m.concepts.size()) {
      fail(ErrorKind::SchemaError, "class '" + truth.class_name() + "' has " + std::to_string(truth.bits().size()) +
                                       " bits but the manifest declares " + std::to_string(m.concepts.size()) +
                                       " concepts");
    }
    if (!class_names.insert(truth.class_name()).second) {
      fail(ErrorKind::SchemaError, "duplicate class name '" + truth.class_name() + "'");
    }
    m.classes.push_back(std::move(truth));
  }

  m.params = require_field(doc, "hyperparams", "manifest").get<HyperParams>();

  if (auto it = doc.find("baselines"); it != doc.end() && !it->is_null()) {
    m.baselines.alpha = require_as<std::size_t>(*it, "alpha", "baselines");
    m.baselines.beta = require_as<std::size_t>(*it, "beta", "baselines");
    if (m.baselines.alpha == 0 || m.baselines.beta == 0) fail(ErrorKind::SchemaError, "baselines alpha/beta must be >= 1");
  }

  if (auto it = doc.find("samples"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) fail(ErrorKind::SchemaError, "manifest.samples must be an array");
    SampleSet samples;
    for (const auto& block : *it) {
      const auto label = require_as<std::string>(block, "class", "samples");
      m.class_index(label);
      auto vectors = loader.load(require_as<std::string>(block, "embedding_file", "samples"), "samples of '" + label + "'");
      for (std::size_t r = 0; r < vectors.size(); ++r) {
        samples.ids.push_back(label + "#" + std::to_string(r));
        samples.labels.push_back(label);
        samples.embeddings.push_back(std::move(vectors[r]));
      }
    }
    m.samples = std::move(samples);
  }

  if (auto it = doc.find("head"); it != doc.end() && !it->is_null()) {
    auto rows = loader.load(require_as<std::string>(*it, "weights_file", "head"), "head");
    auto biases = require_as<std::vector<double>>(*it, "biases", "head");
    if (rows.size() != m.classes.size() || biases.size() != m.classes.size()) {
      fail(ErrorKind::SchemaError, "head must have one weight row and one bias per class");
    }
    Eigen::MatrixXd w(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(loader.dim()));
    for (std::size_t r = 0; r < rows.size(); ++r) w.row(static_cast<Eigen::Index>(r)) = rows[r].view().transpose();
    m.head = LinearHead(std::move(w), Eigen::Map<Eigen::VectorXd>(biases.data(), static_cast<Eigen::Index>(biases.size())));
  }

  m.dim = loader.dim();
  validate_params(m.params, m.concepts, m.pool);
  return m;
}

std::filesystem::path save_manifest(const std::filesystem::path& dir, const Manifest& m) {
  std::filesystem::create_directories(dir);
  Json doc;
  doc["version"] = 1;

  Json concepts = Json::array();
  for (std::size_t i = 0; i < m.concepts.size(); ++i) {
    const auto file = "concept_" + std::to_string(i) + ".emb";
    write_embedding_file(dir / file, m.concepts[i].embeddings, m.dim);
    Json entry{{"name", m.concepts[i].name}, {"embedding_file", file}};
    entry["prompt"] = m.concepts[i].prompt ? Json(*m.concepts[i].prompt) : Json(nullptr);
    concepts.push_back(std::move(entry));
  }
  doc["concepts"] = std::move(concepts);

  write_embedding_file(dir / "random_pool.emb", m.pool.embeddings, m.dim);
  doc["random_pool"] = Json{{"source", m.pool.source}, {"embedding_file", "random_pool.emb"}};
  doc["classes"] = m.classes;
  doc["hyperparams"] = m.params;
  doc["baselines"] = Json{{"alpha", m.baselines.alpha}, {"beta", m.baselines.beta}};

  if (m.samples) {
    Json blocks = Json::array();
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
      Embeddings rows;
      for (std::size_t i = 0; i < m.samples->size(); ++i) {
        if (m.samples->labels[i] == m.classes[c].class_name()) rows.push_back(m.samples->embeddings[i]);
      }
      if (rows.empty()) continue;
      const auto file = "samples_" + std::to_string(c) + ".emb";
      write_embedding_file(dir / file, rows, m.dim);
      blocks.push_back(Json{{"class", m.classes[c].class_name()}, {"embedding_file", file}});
    }
    doc["samples"] = std::move(blocks);
  }

  if (m.head) {
    Embeddings rows;
    for (std::size_t k = 0; k < m.head->classes(); ++k) {
      const Eigen::VectorXd w = m.head->class_weights(k);
      rows.emplace_back(std::vector<double>(w.data(), w.data() + w.size()));
    }
    write_embedding_file(dir / "head_weights.emb", rows, m.dim);
    const auto& b = m.head->biases();
    doc["head"] = Json{{"weights_file", "head_weights.emb"}, {"biases", std::vector<double>(b.data(), b.data() + b.size())}};
  }

  const auto path = dir / "manifest.json";
  write_file_atomic(path, doc.dump(2) + "\n");
  return path;
}

}  // namespace copronn
