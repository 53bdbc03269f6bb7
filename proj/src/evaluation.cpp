#include "copronn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace copronn {

double cosine_similarity(std::span<const double> truth, std::span<const double> prediction) {
  if (truth.size() != prediction.size()) {
    fail(ErrorKind::DimensionMismatch, "cosine similarity of vectors with lengths " + std::to_string(truth.size()) +
                                           " and " + std::to_string(prediction.size()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    dot += truth[i] * prediction[i];
    nu += truth[i] * truth[i];
    nv += prediction[i] * prediction[i];
  }
  if (nu == 0.0) fail(ErrorKind::ZeroVector, "ground-truth vector is zero");
  if (nv == 0.0) return 0.0;
  const double cs = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(cs, -1.0, 1.0);
}

std::vector<ClassStats> evaluate_method(std::span<const std::vector<double>> predictions,
                                        std::span<const std::string> labels,
                                        std::span<const GroundTruthConceptVector> truths) {
  if (predictions.size() != labels.size()) fail(ErrorKind::PreconditionFailed, "one label per prediction is required");
  std::vector<std::vector<double>> per_class(truths.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    auto it = std::find_if(truths.begin(), truths.end(),
                           [&](const GroundTruthConceptVector& t) { return t.class_name() == labels[i]; });
    if (it == truths.end()) fail(ErrorKind::UnknownClass, "sample label '" + labels[i] + "' has no ground truth");
    const auto c = static_cast<std::size_t>(it - truths.begin());
    per_class[c].push_back(cosine_similarity(it->as_reals(), predictions[i]));
  }

  std::vector<ClassStats> out;
  for (std::size_t c = 0; c < truths.size(); ++c) {
    const auto& values = per_class[c];
    if (values.empty()) continue;
    ClassStats stats;
    stats.class_name = truths[c].class_name();
    stats.n_samples = values.size();
    // sorted accumulation keeps the result independent of sample order
    auto sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : sorted) sum += v;
    stats.mean_cs = sum / static_cast<double>(sorted.size());
    double var = 0.0;
    for (double v : sorted) var += (v - stats.mean_cs) * (v - stats.mean_cs);
    stats.std_cs = std::sqrt(var / static_cast<double>(sorted.size()));
    out.push_back(std::move(stats));
  }
  return out;
}

std::string format_fixed4(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::string format_cell(double mean, double std_dev) { return format_fixed4(mean) + " ± " + format_fixed4(std_dev); }

ComparisonTable compare_methods(std::span<const MethodReport> reports) {
  ComparisonTable table;
  if (reports.empty()) return table;
  for (const auto& s : reports.front().per_class) table.classes.push_back(s.class_name);
  const std::set<std::string> reference(table.classes.begin(), table.classes.end());
  for (const auto& r : reports) {
    std::set<std::string> names;
    for (const auto& s : r.per_class) names.insert(s.class_name);
    if (names != reference) {
      fail(ErrorKind::ClassSetMismatch, "method '" + r.method + "' covers a different class set than '" +
                                            reports.front().method + "'");
    }
    table.methods.push_back(r.method);
  }

  for (const auto& cls : table.classes) {
    std::vector<ComparisonCell> row;
    for (const auto& r : reports) {
      const auto& s = *std::find_if(r.per_class.begin(), r.per_class.end(),
                                    [&](const ClassStats& x) { return x.class_name == cls; });
      row.push_back({s.mean_cs, s.std_cs, false, format_cell(s.mean_cs, s.std_cs)});
    }
    double best = row.front().mean_cs;
    for (const auto& cell : row) best = std::max(best, cell.mean_cs);
    for (auto& cell : row) cell.best = cell.mean_cs == best;
    table.cells.push_back(std::move(row));
  }
  return table;
}

std::string ComparisonTable::to_markdown() const {
  std::string out = "| Class |";
  for (const auto& m : methods) out += " " + m + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < methods.size(); ++i) out += "---|";
  out += "\n";
  for (std::size_t c = 0; c < classes.size(); ++c) {
    out += "| " + classes[c] + " |";
    for (const auto& cell : cells[c]) out += cell.best ? " **" + cell.text + "** |" : " " + cell.text + " |";
    out += "\n";
  }
  return out;
}

std::vector<std::vector<double>> class_mean_scores(std::span<const std::vector<double>> predictions,
                                                   std::span<const std::string> labels,
                                                   std::span<const std::string> class_names) {
  std::vector<std::vector<double>> sums(class_names.size());
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    auto it = std::find(class_names.begin(), class_names.end(), labels[i]);
    if (it == class_names.end()) fail(ErrorKind::UnknownClass, "sample label '" + labels[i] + "' is not a known class");
    const auto c = static_cast<std::size_t>(it - class_names.begin());
    if (sums[c].empty()) sums[c].assign(predictions[i].size(), 0.0);
    for (std::size_t j = 0; j < predictions[i].size(); ++j) sums[c][j] += predictions[i][j];
    ++counts[c];
  }
  for (std::size_t c = 0; c < sums.size(); ++c) {
    for (double& v : sums[c]) v /= static_cast<double>(counts[c]);
  }
  return sums;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string eval_report_csv(const EvalReport& report) {
  std::string out = "class,method,mean_cs,std_cs,n\n";
  if (report.methods.empty()) return out;
  // one row per class x method, classes in the first report's order
  for (const auto& first : report.methods.front().per_class) {
    for (const auto& m : report.methods) {
      for (const auto& s : m.per_class) {
        if (s.class_name != first.class_name) continue;
        out += csv_field(s.class_name) + "," + csv_field(m.method) + "," + format_fixed4(s.mean_cs) + "," +
               format_fixed4(s.std_cs) + "," + std::to_string(s.n_samples) + "\n";
      }
    }
  }
  return out;
}

nlohmann::ordered_json eval_report_json(const EvalReport& report) {
  nlohmann::ordered_json methods = nlohmann::ordered_json::object();
  for (const auto& m : report.methods) {
    nlohmann::ordered_json classes = nlohmann::ordered_json::object();
    for (const auto& s : m.per_class) {
      classes[s.class_name] = {{"mean_cs", s.mean_cs}, {"std_cs", s.std_cs}, {"n_samples", s.n_samples}};
    }
    methods[m.method] = std::move(classes);
  }
  return {{"metadata", report.metadata}, {"per_method", std::move(methods)}};
}

}  // namespace copronn
