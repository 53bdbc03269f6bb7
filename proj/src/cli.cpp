#include "copronn/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <optional>

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "copronn/evaluation.hpp"
#include "copronn/pipeline.hpp"
#include "copronn/serialization.hpp"
#include "copronn/synthetic.hpp"

namespace copronn {

namespace {

using OrderedJson = nlohmann::ordered_json;

struct Overrides {
  std::optional<std::size_t> k;
  std::optional<double> t;
  std::optional<std::size_t> alpha;
  std::optional<std::size_t> beta;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> top_n;
  std::optional<std::string> metric;
};

struct RunConfig {
  std::string manifest;
  std::string out;
  std::string spec;
  std::string samples;
  std::string predictions;
  std::vector<std::string> methods{"copronn", "tcav", "ibd"};
  Overrides overrides;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--k", o.k, "Number of neighbors");
  cmd->add_option("--t", o.t, "Relevance threshold in (0, 1]");
  cmd->add_option("--alpha", o.alpha, "Number of random partitions");
  cmd->add_option("--beta", o.beta, "Random partition size");
  cmd->add_option("--seed", o.seed, "Seed for every random draw");
  cmd->add_option("--top-n", o.top_n, "Select the N highest-scoring concepts instead of thresholding");
  cmd->add_option("--metric", o.metric, "Distance metric")->check(CLI::IsMember({"euclidean", "cosine"}));
}

void apply_overrides(Manifest& m, const Overrides& o) {
  auto& p = m.params;
  if (o.k) p.k = *o.k;
  if (o.t) p.t = *o.t;
  if (o.alpha) p.alpha = *o.alpha;
  if (o.beta) p.beta = *o.beta;
  if (o.seed) p.seed = *o.seed;
  if (o.top_n) p.selection_mode = TopNSelection{*o.top_n};
  if (o.metric) p.metric = parse_metric(*o.metric);
  validate_params(p, m.concepts, m.pool);
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto logger = std::make_shared<spdlog::logger>("copronn", std::make_shared<spdlog::sinks::ostream_sink_st>(err));
  logger->set_pattern("[%l] %v");
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("COPRONN_LOG")) {
    const auto parsed = spdlog::level::from_str(env);
    // from_str maps unknown strings to off; keep the default unless "off" was meant
    if (parsed != spdlog::level::off || std::string_view(env) == "off") level = parsed;
  }
  logger->set_level(level);
  return logger;
}

std::string method_label(std::string_view flag) {
  std::string lower(flag);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "copronn") return std::string(kMethodCoPronn);
  if (lower == "tcav") return std::string(kMethodTcav);
  if (lower == "ibd") return std::string(kMethodIbd);
  fail(ErrorKind::SchemaError, "unknown method '" + std::string(flag) + "' (expected copronn, tcav or ibd)");
}

OrderedJson predictions_json(const MethodPredictions& p, const std::vector<std::string>& concepts) {
  OrderedJson samples = OrderedJson::array();
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    samples.push_back({{"sample_id", p.sample_ids[i]}, {"label", p.labels[i]}, {"scores", p.rows[i]}});
  }
  return {{"method", p.method}, {"concepts", concepts}, {"samples", std::move(samples)}};
}

MethodPredictions predictions_from_json(const Json& j, std::size_t m) {
  MethodPredictions p;
  p.method = require_as<std::string>(j, "method", "predictions");
  for (const auto& s : require_field(j, "samples", "predictions")) {
    p.sample_ids.push_back(require_as<std::string>(s, "sample_id", "predictions.samples"));
    auto label = s.find("label");
    if (label == s.end() || !label->is_string()) {
      fail(ErrorKind::UnknownClass, "prediction for '" + p.sample_ids.back() + "' carries no class label");
    }
    p.labels.push_back(label->get<std::string>());
    auto scores = require_as<std::vector<double>>(s, "scores", "predictions.samples");
    if (scores.size() < m) fail(ErrorKind::DimensionMismatch, "prediction row shorter than the concept count");
    scores.resize(m);
    p.rows.push_back(std::move(scores));
  }
  return p;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::MissingFile, path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::SchemaError, path + " is not valid JSON: " + e.what());
  }
}

OrderedJson report_metadata(const Manifest& m) {
  Json params = m.params;
  return {{"hyperparams", params},
          {"baselines", {{"alpha", m.baselines.alpha}, {"beta", m.baselines.beta}}},
          {"seed", m.params.seed},
          {"cs_spread", "population standard deviation across samples"},
          {"ibd_negative_scores", "clamped to 0"},
          {"concepts", m.concept_names()}};
}

EvalReport evaluate_all(const Manifest& m, const std::vector<MethodPredictions>& predictions) {
  EvalReport report;
  report.metadata = report_metadata(m);
  for (const auto& p : predictions) {
    report.methods.push_back({p.method, evaluate_method(p.rows, p.labels, m.classes)});
  }
  return report;
}

void write_eval_files(const std::filesystem::path& dir, const EvalReport& report) {
  write_file_atomic(dir / "eval.json", eval_report_json(report).dump(2) + "\n");
  write_file_atomic(dir / "eval.csv", eval_report_csv(report));
}

int cmd_synth(const RunConfig& cfg, std::ostream& out, spdlog::logger& log) {
  const auto spec = parse_synthetic_spec(read_json_file(cfg.spec));
  log.info("generating corpus: dim {}, {} concepts, {} classes", spec.dim, spec.concepts.size(), spec.classes.size());
  const auto manifest = generate_corpus(spec);
  const auto path = save_manifest(cfg.out, manifest);
  out << "wrote " << path.string() << "\n";
  return kExitOk;
}

int cmd_explain(const RunConfig& cfg, std::ostream& out, spdlog::logger& log) {
  auto m = load_manifest(cfg.manifest);
  apply_overrides(m, cfg.overrides);

  Embeddings external;
  std::vector<std::string> ids;
  std::vector<std::optional<std::string>> labels;
  const Embeddings* samples = nullptr;
  if (!cfg.samples.empty()) {
    external = read_embedding_file(cfg.samples);
    for (std::size_t i = 0; i < external.size(); ++i) ids.push_back(std::to_string(i));
    labels.assign(external.size(), std::nullopt);
    samples = &external;
  } else {
    const auto& set = require_samples(m);
    ids = set.ids;
    labels.assign(set.labels.begin(), set.labels.end());
    samples = &set.embeddings;
  }
  log.info("scoring {} samples over {} partitions", samples->size(), m.params.alpha);
  const auto P = run_copronn_scores(m, *samples, ids);

  OrderedJson records = OrderedJson::array();
  for (std::size_t i = 0; i < P.rows(); ++i) {
    std::optional<std::string> predicted;
    if (m.head && m.head->dim() == m.dim) {
      predicted = m.classes.at(m.head->predict((*samples)[i])).class_name();
    } else {
      predicted = labels[i];
    }
    const auto e = explain_row(P, i, m.params, predicted);
    Json record = e;
    OrderedJson ordered{{"sample_id", e.sample_id}};
    ordered["label"] = labels[i] ? OrderedJson(*labels[i]) : OrderedJson(nullptr);
    ordered["predicted_class"] = record["predicted_class"];
    ordered["relevant"] = e.relevant;
    ordered["absent"] = e.absent;
    std::vector<std::string> names;
    for (auto j : e.relevant) names.push_back(m.concepts[j].name);
    ordered["relevant_names"] = names;
    ordered["scores"] = e.scores;
    ordered["rendered"] = e.rendered;
    records.push_back(std::move(ordered));
  }
  Json params = m.params;
  auto concepts = m.concept_names();
  concepts.emplace_back(ScoreMatrix::kRandomColumn);
  OrderedJson doc{{"method", std::string(kMethodCoPronn)},
                  {"concepts", concepts},
                  {"hyperparams", params},
                  {"samples", std::move(records)}};
  write_file_atomic(cfg.out, doc.dump(2) + "\n");
  out << "wrote " << P.rows() << " explanations to " << cfg.out << "\n";
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, spdlog::logger&) {
  const auto m = load_manifest(cfg.manifest);
  const auto doc = read_json_file(cfg.predictions);
  std::vector<MethodPredictions> predictions;
  if (doc.contains("methods")) {
    for (const auto& entry : doc.at("methods")) predictions.push_back(predictions_from_json(entry, m.concept_count()));
  } else {
    predictions.push_back(predictions_from_json(doc, m.concept_count()));
  }
  const auto report = evaluate_all(m, predictions);
  std::filesystem::create_directories(cfg.out);
  write_eval_files(cfg.out, report);
  out << eval_report_csv(report);
  return kExitOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, spdlog::logger& log) {
  auto m = load_manifest(cfg.manifest);
  apply_overrides(m, cfg.overrides);
  require_samples(m);
  validate_dimensions(m.concepts, m.pool, m.samples->embeddings);

  std::vector<std::string> methods;
  for (const auto& flag : cfg.methods) {
    const auto label = method_label(flag);
    if (std::find(methods.begin(), methods.end(), label) == methods.end()) methods.push_back(label);
  }

  std::vector<MethodPredictions> predictions;
  std::optional<BaselineFits> fits;
  for (const auto& method : methods) {
    if (method == kMethodCoPronn) {
      log.info("running CoProNN (alpha {}, beta {}, k {})", m.params.alpha, m.params.beta, m.params.k);
      predictions.push_back(run_copronn(m));
      continue;
    }
    if (!fits) {
      log.info("fitting concept normals over {} baseline partitions", m.baselines.alpha);
      require_head(m);
      fits = fit_baselines(m);
    }
    predictions.push_back(method == kMethodTcav ? run_tcav(m, *fits) : run_ibd(m, *fits));
  }

  const auto report = evaluate_all(m, predictions);
  const auto table = compare_methods(report.methods);
  const std::filesystem::path dir = cfg.out;
  std::filesystem::create_directories(dir);
  write_eval_files(dir, report);
  write_file_atomic(dir / "comparison.md", table.to_markdown());

  const auto concepts = m.concept_names();
  std::vector<std::string> class_names;
  for (const auto& c : m.classes) class_names.push_back(c.class_name());

  std::string means_csv = "class,method,concept,mean_score\n";
  std::string class_level_csv = "class,method,concept,score\n";
  OrderedJson all = OrderedJson::array();
  for (const auto& p : predictions) {
    const auto means = class_mean_scores(p.rows, p.labels, class_names);
    for (std::size_t c = 0; c < class_names.size(); ++c) {
      for (std::size_t j = 0; j < means[c].size(); ++j) {
        means_csv += csv_field(class_names[c]) + "," + csv_field(p.method) + "," + csv_field(concepts[j]) + "," +
                     format_fixed4(means[c][j]) + "\n";
      }
      if (c < p.class_scores.size()) {
        for (std::size_t j = 0; j < p.class_scores[c].size(); ++j) {
          class_level_csv += csv_field(class_names[c]) + "," + csv_field(p.method) + "," + csv_field(concepts[j]) +
                             "," + format_fixed4(p.class_scores[c][j]) + "\n";
        }
      }
    }
    all.push_back(predictions_json(p, concepts));
  }
  write_file_atomic(dir / "class_scores.csv", means_csv);
  write_file_atomic(dir / "class_level_scores.csv", class_level_csv);
  write_file_atomic(dir / "predictions.json", OrderedJson{{"methods", std::move(all)}}.dump(2) + "\n");

  out << table.to_markdown();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concept-based prototypical nearest-neighbor explanations in embedding space", "copronn"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic concept corpus");
  synth->add_option("--spec", cfg.spec, "Synthetic corpus spec (JSON)")->required();
  synth->add_option("--out", cfg.out, "Output directory")->required();

  auto* explain = app.add_subcommand("explain", "Explain samples with CoProNN");
  explain->add_option("--manifest", cfg.manifest, "Concept manifest (JSON)")->required();
  explain->add_option("--samples", cfg.samples, "Embedding file of samples (default: manifest samples)");
  explain->add_option("--out", cfg.out, "Output explanations JSON")->required();
  add_override_flags(explain, cfg.overrides);

  auto* eval = app.add_subcommand("eval", "Score predictions against ground-truth concept vectors");
  eval->add_option("--manifest", cfg.manifest, "Concept manifest (JSON)")->required();
  eval->add_option("--predictions", cfg.predictions, "Predictions or explanations JSON")->required();
  eval->add_option("--out", cfg.out, "Output directory")->required();

  auto* compare = app.add_subcommand("compare", "Run CoProNN, TCAV and IBD and compare them");
  compare->add_option("--manifest", cfg.manifest, "Concept manifest (JSON)")->required();
  compare->add_option("--out", cfg.out, "Output directory")->required();
  compare->add_option("--methods", cfg.methods, "Methods to run")->delimiter(',');
  add_override_flags(compare, cfg.overrides);

  std::vector<std::string> argv_storage{"copronn"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  auto log = make_logger(err);
  try {
    if (synth->parsed()) return cmd_synth(cfg, out, *log);
    if (explain->parsed()) return cmd_explain(cfg, out, *log);
    if (eval->parsed()) return cmd_eval(cfg, out, *log);
    return cmd_compare(cfg, out, *log);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace copronn
