#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "copronn/core.hpp"

namespace copronn {

/// u.v / (|u| |v|). `truth` must be nonzero (ZeroVector otherwise); a zero
/// `prediction` scores 0 so "nothing detected" is penalized rather than fatal.
double cosine_similarity(std::span<const double> truth, std::span<const double> prediction);

struct ClassStats {
  std::string class_name;
  double mean_cs = 0.0;
  double std_cs = 0.0;  // population standard deviation across samples
  std::size_t n_samples = 0;

  friend bool operator==(const ClassStats&, const ClassStats&) = default;
};

/// Per-class mean and population std of the per-sample cosine similarity.
/// Classes appear in `truths` order; classes without samples are omitted.
std::vector<ClassStats> evaluate_method(std::span<const std::vector<double>> predictions,
                                        std::span<const std::string> labels,
                                        std::span<const GroundTruthConceptVector> truths);

struct MethodReport {
  std::string method;
  std::vector<ClassStats> per_class;

  friend bool operator==(const MethodReport&, const MethodReport&) = default;
};

struct EvalReport {
  std::vector<MethodReport> methods;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

/// "0.9926 ± 0.0043"
std::string format_cell(double mean, double std_dev);

struct ComparisonCell {
  double mean_cs = 0.0;
  double std_cs = 0.0;
  bool best = false;  // row maximum; ties all marked
  std::string text;
};

struct ComparisonTable {
  std::vector<std::string> classes;
  std::vector<std::string> methods;
  std::vector<std::vector<ComparisonCell>> cells;  // [class][method]

  /// Markdown table, best cells in bold.
  std::string to_markdown() const;
};

/// Throws ClassSetMismatch unless every report covers the same classes.
ComparisonTable compare_methods(std::span<const MethodReport> reports);

/// Mean score vector per class (rows grouped by label), in `class_names` order.
/// Classes without samples get an empty vector.
std::vector<std::vector<double>> class_mean_scores(std::span<const std::vector<double>> predictions,
                                                   std::span<const std::string> labels,
                                                   std::span<const std::string> class_names);

/// class,method,mean_cs,std_cs,n
std::string eval_report_csv(const EvalReport& report);
nlohmann::ordered_json eval_report_json(const EvalReport& report);

/// Field quoting for CSV output.
std::string csv_field(std::string_view text);
/// Fixed 4-decimal rendering used by every report.
std::string format_fixed4(double value);

}  // namespace copronn
