#include "copronn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "copronn/knn_explainer.hpp"
#include "copronn/random.hpp"

namespace copronn {

namespace {

template <typename F>
auto as_spec_error(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SpecError) throw;
    fail(ErrorKind::SpecError, e.what());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::SpecError, e.what());
  }
}

Eigen::VectorXd gaussian(Rng& rng, std::size_t dim) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = standard_normal(rng);
  return v;
}

// Values are rounded to f32 so the in-memory corpus equals what the embedding
// files store.
EmbeddingVector to_embedding(const Eigen::VectorXd& v) {
  std::vector<double> values(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) values[static_cast<std::size_t>(i)] = static_cast<float>(v[i]);
  return EmbeddingVector(std::move(values));
}

}  // namespace

void validate_synthetic_spec(const SyntheticSpec& spec) {
  auto bad = [](const std::string& msg) { fail(ErrorKind::SpecError, msg); };
  if (spec.dim == 0) bad("dim must be positive");
  if (spec.concepts.empty()) bad("at least one concept is required");
  if (!(spec.sigma > 0.0)) bad("sigma must be positive");
  if (spec.sample_sigma && !(*spec.sample_sigma > 0.0)) bad("sample_sigma must be positive");
  std::set<std::string> names;
  for (const auto& c : spec.concepts) {
    if (!names.insert(c.name).second) bad("duplicate concept name '" + c.name + "'");
    if (c.sigma && !(*c.sigma > 0.0)) bad("concept '" + c.name + "' sigma must be positive");
    if (c.mean) {
      if (c.mean->size() != spec.dim) bad("concept '" + c.name + "' mean has the wrong dimension");
      double n2 = 0.0;
      for (double x : *c.mean) n2 += x * x;
      if (!(n2 > 0.0) || !std::isfinite(n2)) bad("concept '" + c.name + "' mean must be a finite nonzero vector");
    }
  }
  if (spec.classes.empty()) bad("at least one class is required");
  std::set<std::string> class_names;
  for (const auto& c : spec.classes) {
    if (!class_names.insert(c.name).second) bad("duplicate class name '" + c.name + "'");
    if (c.bits.size() != spec.concepts.size()) bad("class '" + c.name + "' bits length differs from concept count");
    if (std::none_of(c.bits.begin(), c.bits.end(), [](auto b) { return b == 1; })) {
      bad("class '" + c.name + "' needs at least one concept bit");
    }
    if (std::any_of(c.bits.begin(), c.bits.end(), [](auto b) { return b > 1; })) bad("class bits must be 0 or 1");
  }
  if (spec.prototypes_per_concept == 0) bad("prototypes_per_concept must be positive");
  if (spec.pool_size < 2) bad("pool_size must be at least 2");
  if (!(spec.pool_radius > 0.0)) bad("pool_radius must be positive");
  if (!(spec.pool_max_cosine > -1.0 && spec.pool_max_cosine <= 1.0)) bad("pool_max_cosine must lie in (-1, 1]");
  if (spec.samples_per_class == 0) bad("samples_per_class must be positive");
  if (spec.hyperparams) as_spec_error([&] { validate_params(*spec.hyperparams); return 0; });
}

SyntheticSpec parse_synthetic_spec(const Json& doc) {
  return as_spec_error([&] {
    SyntheticSpec spec;
    if (!doc.is_object()) fail(ErrorKind::SpecError, "synthetic spec must be a JSON object");
    spec.dim = require_as<std::size_t>(doc, "dim", "spec");
    spec.seed = require_as<std::uint64_t>(doc, "seed", "spec");
    spec.sigma = require_as<double>(doc, "sigma", "spec");
    if (doc.contains("sample_sigma")) spec.sample_sigma = require_as<double>(doc, "sample_sigma", "spec");
    for (const auto& c : require_field(doc, "concepts", "spec")) {
      SyntheticConcept concept_spec;
      concept_spec.name = require_as<std::string>(c, "name", "concept");
      if (c.contains("prompt")) concept_spec.prompt = require_as<std::string>(c, "prompt", "concept");
      if (c.contains("sigma")) concept_spec.sigma = require_as<double>(c, "sigma", "concept");
      if (c.contains("mean")) concept_spec.mean = require_as<std::vector<double>>(c, "mean", "concept");
      spec.concepts.push_back(std::move(concept_spec));
    }
    for (const auto& c : require_field(doc, "classes", "spec")) {
      auto truth = ground_truth_from_json(c);
      spec.classes.push_back({truth.class_name(), truth.bits()});
    }
    if (doc.contains("prototypes_per_concept")) spec.prototypes_per_concept = require_as<std::size_t>(doc, "prototypes_per_concept", "spec");
    if (doc.contains("pool_size")) spec.pool_size = require_as<std::size_t>(doc, "pool_size", "spec");
    if (doc.contains("pool_radius")) spec.pool_radius = require_as<double>(doc, "pool_radius", "spec");
    if (doc.contains("pool_max_cosine")) spec.pool_max_cosine = require_as<double>(doc, "pool_max_cosine", "spec");
    if (doc.contains("samples_per_class")) spec.samples_per_class = require_as<std::size_t>(doc, "samples_per_class", "spec");
    if (doc.contains("hyperparams")) spec.hyperparams = doc.at("hyperparams").get<HyperParams>();
    if (doc.contains("baselines")) {
      spec.baselines.alpha = require_as<std::size_t>(doc.at("baselines"), "alpha", "baselines");
      spec.baselines.beta = require_as<std::size_t>(doc.at("baselines"), "beta", "baselines");
    }
    validate_synthetic_spec(spec);
    return spec;
  });
}

Json synthetic_spec_to_json(const SyntheticSpec& spec) {
  Json doc{{"dim", spec.dim},
           {"seed", spec.seed},
           {"sigma", spec.sigma},
           {"prototypes_per_concept", spec.prototypes_per_concept},
           {"pool_size", spec.pool_size},
           {"pool_radius", spec.pool_radius},
           {"pool_max_cosine", spec.pool_max_cosine},
           {"samples_per_class", spec.samples_per_class},
           {"baselines", {{"alpha", spec.baselines.alpha}, {"beta", spec.baselines.beta}}}};
  if (spec.sample_sigma) doc["sample_sigma"] = *spec.sample_sigma;
  Json concepts = Json::array();
  for (const auto& c : spec.concepts) {
    Json entry{{"name", c.name}};
    if (c.prompt) entry["prompt"] = *c.prompt;
    if (c.sigma) entry["sigma"] = *c.sigma;
    if (c.mean) entry["mean"] = *c.mean;
    concepts.push_back(std::move(entry));
  }
  doc["concepts"] = std::move(concepts);
  Json classes = Json::array();
  for (const auto& c : spec.classes) classes.push_back(GroundTruthConceptVector(c.name, c.bits));
  doc["classes"] = std::move(classes);
  if (spec.hyperparams) doc["hyperparams"] = *spec.hyperparams;
  return doc;
}

Manifest generate_corpus(const SyntheticSpec& spec) {
  validate_synthetic_spec(spec);
  Rng rng(spec.seed);
  const std::size_t m = spec.concepts.size();

  std::vector<Eigen::VectorXd> means;
  for (const auto& c : spec.concepts) {
    if (c.mean) {
      means.push_back(Eigen::Map<const Eigen::VectorXd>(c.mean->data(), static_cast<Eigen::Index>(spec.dim)).normalized());
      continue;
    }
    // drawn means are orthogonal to every earlier mean while dimensions remain
    Eigen::VectorXd mu = gaussian(rng, spec.dim);
    Eigen::VectorXd projected = mu;
    for (const auto& prior : means) projected -= prior.dot(projected) * prior;
    means.push_back(projected.norm() > 1e-6 * mu.norm() ? projected.normalized() : mu.normalized());
  }
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      if (means[a].dot(means[b]) > 1.0 - 1e-9) {
        fail(ErrorKind::SpecError, "concepts '" + spec.concepts[a].name + "' and '" + spec.concepts[b].name +
                                       "' share a mean direction");
      }
    }
  }

  Manifest out;
  out.dim = spec.dim;
  for (std::size_t j = 0; j < m; ++j) {
    ConceptSet c;
    c.index = j;
    c.name = spec.concepts[j].name;
    c.prompt = spec.concepts[j].prompt;
    const double sigma = spec.concepts[j].sigma.value_or(spec.sigma);
    for (std::size_t i = 0; i < spec.prototypes_per_concept; ++i) {
      c.embeddings.push_back(to_embedding(means[j] + sigma * gaussian(rng, spec.dim)));
    }
    out.concepts.push_back(std::move(c));
  }

  out.pool.source = "synthetic isotropic pool (seed " + std::to_string(spec.seed) + ")";
  constexpr std::size_t kMaxAttempts = 100000;
  for (std::size_t i = 0; i < spec.pool_size; ++i) {
    std::size_t attempts = 0;
    for (;;) {
      if (++attempts > kMaxAttempts) {
        fail(ErrorKind::SpecError, "pool_max_cosine is too strict to draw random pool points");
      }
      const Eigen::VectorXd u = gaussian(rng, spec.dim).normalized();
      double worst = -1.0;
      for (const auto& mu : means) worst = std::max(worst, u.dot(mu));
      if (worst <= spec.pool_max_cosine) {
        out.pool.embeddings.push_back(to_embedding(spec.pool_radius * u));
        break;
      }
    }
  }

  std::vector<Eigen::VectorXd> centroids;
  for (const auto& cls : spec.classes) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.dim));
    for (std::size_t j = 0; j < m; ++j) {
      if (cls.bits[j]) c += means[j];
    }
    centroids.push_back(c.normalized());
    out.classes.emplace_back(cls.name, cls.bits);
  }

  SampleSet samples;
  const double sample_sigma = spec.sample_sigma.value_or(spec.sigma);
  for (std::size_t k = 0; k < spec.classes.size(); ++k) {
    for (std::size_t i = 0; i < spec.samples_per_class; ++i) {
      samples.ids.push_back(spec.classes[k].name + "#" + std::to_string(i));
      samples.labels.push_back(spec.classes[k].name);
      samples.embeddings.push_back(to_embedding(centroids[k] + sample_sigma * gaussian(rng, spec.dim)));
    }
  }
  out.samples = std::move(samples);

  Eigen::VectorXd centre = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.dim));
  for (const auto& c : centroids) centre += c;
  centre /= static_cast<double>(centroids.size());
  Eigen::MatrixXd weights(static_cast<Eigen::Index>(centroids.size()), static_cast<Eigen::Index>(spec.dim));
  for (std::size_t k = 0; k < centroids.size(); ++k) weights.row(static_cast<Eigen::Index>(k)) = (centroids[k] - centre).transpose();
  weights = weights.cast<float>().cast<double>().eval();
  out.head = LinearHead(std::move(weights), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(centroids.size())));

  if (spec.hyperparams) {
    out.params = *spec.hyperparams;
  } else {
    out.params = HyperParams{};
    out.params.k = 10;
    out.params.alpha = 100;
    out.params.beta = 30;
    out.params.t = default_threshold(out.params.k, m);
    out.params.seed = spec.seed;
  }
  out.baselines = spec.baselines;
  return out;
}

SyntheticSpec wild_bee_spec(double sigma, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.dim = 16;
  spec.sigma = sigma;
  spec.seed = seed;
  spec.concepts = {
      {"fuzzy orange", "fuzzy dark orange bee", std::nullopt, std::nullopt},
      {"fuzzy yellow", "bee with fuzzy yellow and black stripes", std::nullopt, std::nullopt},
      {"shiny brown", "smooth shiny dark brown bee", std::nullopt, std::nullopt},
  };
  spec.classes = {
      {"A. bicolor", {1, 0, 1}}, {"A. flavipes", {0, 0, 1}}, {"A. fulva", {1, 0, 0}},
      {"B. lucorum", {0, 1, 0}}, {"B. pratorum", {1, 1, 0}},
  };
  return spec;
}

}  // namespace copronn
