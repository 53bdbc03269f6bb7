#include "copronn/serialization.hpp"

#include <string>

namespace copronn {

const Json& require_field(const Json& object, std::string_view field, std::string_view context) {
  if (!object.is_object()) fail(ErrorKind::SchemaError, std::string(context) + " must be a JSON object");
  auto it = object.find(std::string(field));
  if (it == object.end() || it->is_null()) {
    fail(ErrorKind::SchemaError, "missing field " + std::string(context) + "." + std::string(field));
  }
  return *it;
}

namespace {

std::size_t require_count(const Json& object, std::string_view field, std::string_view context) {
  return require_as<std::size_t>(object, field, context);
}

}  // namespace

void to_json(Json& j, const EmbeddingVector& v) { j = Json(std::vector<double>(v.values().begin(), v.values().end())); }

void from_json(const Json& j, EmbeddingVector& v) {
  if (!j.is_array()) fail(ErrorKind::SchemaError, "embedding must be an array of numbers");
  std::vector<double> values;
  values.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) fail(ErrorKind::SchemaError, "embedding entries must be numbers");
    values.push_back(x.get<double>());
  }
  v = EmbeddingVector(std::move(values));
}

void to_json(Json& j, const ConceptSet& c) {
  j = Json{{"index", c.index}, {"name", c.name}, {"embeddings", c.embeddings}};
  j["prompt"] = c.prompt ? Json(*c.prompt) : Json(nullptr);
}

void from_json(const Json& j, ConceptSet& c) {
  c.index = require_count(j, "index", "concept");
  c.name = require_as<std::string>(j, "name", "concept");
  auto it = j.find("prompt");
  c.prompt = (it == j.end() || it->is_null()) ? std::nullopt : std::optional<std::string>(it->get<std::string>());
  c.embeddings = require_field(j, "embeddings", "concept").get<Embeddings>();
}

void to_json(Json& j, const RandomPool& p) { j = Json{{"source", p.source}, {"embeddings", p.embeddings}}; }

void from_json(const Json& j, RandomPool& p) {
  p.source = require_as<std::string>(j, "source", "random_pool");
  p.embeddings = require_field(j, "embeddings", "random_pool").get<Embeddings>();
}

std::string_view to_string(Metric metric) noexcept {
  return metric == Metric::Cosine ? "cosine" : "euclidean";
}

Metric parse_metric(std::string_view text) {
  if (text == "euclidean") return Metric::Euclidean;
  if (text == "cosine") return Metric::Cosine;
  fail(ErrorKind::SchemaError, "unknown metric '" + std::string(text) + "' (expected euclidean or cosine)");
}

void to_json(Json& j, const HyperParams& h) {
  j = Json{{"k", h.k},         {"t", h.t},       {"alpha", h.alpha},
           {"beta", h.beta},   {"seed", h.seed}, {"metric", std::string(to_string(h.metric))}};
  if (const auto* top = std::get_if<TopNSelection>(&h.selection_mode)) {
    j["selection_mode"] = "top_n";
    j["top_n"] = top->n;
  } else {
    j["selection_mode"] = "threshold";
  }
}

void from_json(const Json& j, HyperParams& h) {
  constexpr std::string_view ctx = "hyperparams";
  h.k = require_count(j, "k", ctx);
  h.alpha = require_count(j, "alpha", ctx);
  h.beta = require_count(j, "beta", ctx);
  h.seed = require_as<std::uint64_t>(j, "seed", ctx);

  const auto mode = require_as<std::string>(j, "selection_mode", ctx);
  if (mode == "threshold") {
    h.selection_mode = ThresholdSelection{};
    h.t = require_as<double>(j, "t", ctx);
  } else if (mode == "top_n") {
    h.selection_mode = TopNSelection{require_count(j, "top_n", ctx)};
    if (auto it = j.find("t"); it != j.end() && !it->is_null()) h.t = require_as<double>(j, "t", ctx);
  } else {
    fail(ErrorKind::SchemaError, "hyperparams.selection_mode must be 'threshold' or 'top_n', got '" + mode + "'");
  }
  if (auto it = j.find("metric"); it != j.end() && !it->is_null()) {
    h.metric = parse_metric(require_as<std::string>(j, "metric", ctx));
  } else {
    h.metric = Metric::Euclidean;
  }
  validate_params(h);
}

void to_json(Json& j, const ScoreMatrix& s) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < s.rows(); ++r) {
    rows.push_back(std::vector<double>(s.row(r).begin(), s.row(r).end()));
  }
  j = Json{{"sample_ids", s.sample_ids()}, {"concept_ids", s.concept_ids()}, {"scores", std::move(rows)}};
}

void from_json(const Json& j, ScoreMatrix& s) {
  ScoreMatrix out(require_as<std::vector<std::string>>(j, "sample_ids", "score_matrix"),
                  require_as<std::vector<std::string>>(j, "concept_ids", "score_matrix"));
  const Json& rows = require_field(j, "scores", "score_matrix");
  if (!rows.is_array() || rows.size() != out.rows()) fail(ErrorKind::SchemaError, "score_matrix.scores row count mismatch");
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto values = rows[r].get<std::vector<double>>();
    if (values.size() != out.cols()) fail(ErrorKind::SchemaError, "score_matrix row has the wrong width");
    std::copy(values.begin(), values.end(), out.row(r).begin());
  }
  s = std::move(out);
}

void to_json(Json& j, const Explanation& e) {
  j = Json{{"sample_id", e.sample_id}, {"relevant", e.relevant}, {"absent", e.absent},
           {"scores", e.scores},       {"rendered", e.rendered}};
  j["predicted_class"] = e.predicted_class ? Json(*e.predicted_class) : Json(nullptr);
}

void from_json(const Json& j, Explanation& e) {
  constexpr std::string_view ctx = "explanation";
  e.sample_id = require_as<std::string>(j, "sample_id", ctx);
  auto it = j.find("predicted_class");
  e.predicted_class =
      (it == j.end() || it->is_null()) ? std::nullopt : std::optional<std::string>(it->get<std::string>());
  e.relevant = require_as<std::vector<std::size_t>>(j, "relevant", ctx);
  e.absent = require_as<std::vector<std::size_t>>(j, "absent", ctx);
  e.scores = require_as<std::vector<double>>(j, "scores", ctx);
  e.rendered = require_as<std::string>(j, "rendered", ctx);
}

void to_json(Json& j, const GroundTruthConceptVector& g) {
  std::vector<int> bits(g.bits().begin(), g.bits().end());
  j = Json{{"name", g.class_name()}, {"bits", bits}};
}

GroundTruthConceptVector ground_truth_from_json(const Json& j) {
  auto name = require_as<std::string>(j, "name", "class");
  const Json& bits = require_field(j, "bits", "class '" + name + "'");
  if (!bits.is_array()) fail(ErrorKind::SchemaError, "class '" + name + "' bits must be an array");
  std::vector<std::uint8_t> out;
  for (const auto& b : bits) {
    if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) {
      fail(ErrorKind::SchemaError, "class '" + name + "' bits must be 0 or 1");
    }
    out.push_back(static_cast<std::uint8_t>(b.get<int>()));
  }
  return {std::move(name), std::move(out)};
}

void to_json(Json& j, const LinearHead& h) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < h.weights().rows(); ++r) {
    std::vector<double> row(h.weights().row(r).begin(), h.weights().row(r).end());
    rows.push_back(std::move(row));
  }
  j = Json{{"weights", std::move(rows)},
           {"biases", std::vector<double>(h.biases().data(), h.biases().data() + h.biases().size())}};
}

void from_json(const Json& j, LinearHead& h) {
  auto rows = require_as<std::vector<std::vector<double>>>(j, "weights", "head");
  auto biases = require_as<std::vector<double>>(j, "biases", "head");
  const auto cols = rows.empty() ? 0 : rows.front().size();
  Eigen::MatrixXd w(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) fail(ErrorKind::DimensionMismatch, "head weight rows differ in length");
    for (std::size_t c = 0; c < cols; ++c) w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  h = LinearHead(std::move(w), Eigen::Map<Eigen::VectorXd>(biases.data(), static_cast<Eigen::Index>(biases.size())));
}

}  // namespace copronn
