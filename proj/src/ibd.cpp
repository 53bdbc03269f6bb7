#include "copronn/ibd.hpp"

#include <algorithm>
#include <cmath>

#include "copronn/nnls.hpp"
#include "copronn/random.hpp"
#include "copronn/tcav.hpp"

namespace copronn {

ConceptBasis fit_concept_basis(std::span<const ConceptSet> concepts, std::span<const EmbeddingVector> negatives,
                               std::uint64_t seed, const LogisticOptions& options) {
  if (concepts.empty()) fail(ErrorKind::PreconditionFailed, "concept basis needs at least one concept");
  ConceptBasis basis;
  for (std::size_t j = 0; j < concepts.size(); ++j) {
    if (concepts[j].embeddings.empty()) fail(ErrorKind::PreconditionFailed, "concept '" + concepts[j].name + "' is empty");
    const CAV cav = fit_cav(concepts[j], negatives, derive_seed(seed, j), options);
    if (j == 0) basis.vectors.resize(cav.vector.size(), static_cast<Eigen::Index>(concepts.size()));
    basis.vectors.col(static_cast<Eigen::Index>(j)) = cav.vector;
  }
  return basis;
}

namespace {

struct Fit {
  Eigen::VectorXd coefficients;
  double residual_norm = 0.0;
};

Fit refit(const Eigen::VectorXd& w, const ConceptBasis& basis, const std::vector<std::size_t>& columns) {
  Eigen::MatrixXd sub(w.size(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    sub.col(static_cast<Eigen::Index>(c)) = basis.vectors.col(static_cast<Eigen::Index>(columns[c]));
  }
  Fit fit;
  fit.coefficients = nnls(sub, w);
  fit.residual_norm = (w - sub * fit.coefficients).norm();
  return fit;
}

}  // namespace

ClassDecomposition decompose_class(const Eigen::VectorXd& class_weights, const ConceptBasis& basis,
                                   std::size_t max_components, std::size_t class_index) {
  if (basis.size() > 0 && static_cast<Eigen::Index>(basis.dim()) != class_weights.size()) {
    fail(ErrorKind::DimensionMismatch, "class weights and concept basis differ in dimension");
  }
  if (max_components > basis.size()) {
    fail(ErrorKind::PreconditionFailed, "max_components exceeds the number of concepts");
  }
  ClassDecomposition out;
  out.class_index = class_index;
  out.class_weights = class_weights;
  out.coefficients.assign(basis.size(), 0.0);

  std::vector<std::size_t> selected;
  Eigen::VectorXd coefficients;
  double current = class_weights.norm();
  for (std::size_t step = 0; step < max_components; ++step) {
    std::optional<std::size_t> best;
    Fit best_fit;
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (std::find(selected.begin(), selected.end(), j) != selected.end()) continue;
      auto candidate = selected;
      candidate.push_back(j);
      Fit fit = refit(class_weights, basis, candidate);
      const double bar = best ? best_fit.residual_norm : current;
      if (fit.residual_norm < bar) {
        best = j;
        best_fit = std::move(fit);
      }
    }
    // require a reduction beyond rounding noise
    if (!best || best_fit.residual_norm >= current - 1e-12 * (1.0 + class_weights.norm())) break;
    selected.push_back(*best);
    coefficients = best_fit.coefficients;
    current = best_fit.residual_norm;
  }

  for (std::size_t c = 0; c < selected.size(); ++c) out.coefficients[selected[c]] = coefficients[static_cast<Eigen::Index>(c)];
  out.selected = std::move(selected);

  out.residual = class_weights;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (out.coefficients[j] != 0.0) out.residual -= out.coefficients[j] * basis.vectors.col(static_cast<Eigen::Index>(j));
  }
  return out;
}

namespace {

double class_logit(const EmbeddingVector& a, const ClassDecomposition& d) {
  if (static_cast<Eigen::Index>(a.dim()) != d.class_weights.size()) {
    fail(ErrorKind::DimensionMismatch, "sample and class weights differ in dimension");
  }
  const double logit = d.class_weights.dot(a.view());
  if (std::abs(logit) < 1e-12) {
    fail(ErrorKind::ZeroLogit, "w_k.a = " + std::to_string(logit) + " for class " + std::to_string(d.class_index));
  }
  return logit;
}

}  // namespace

std::vector<double> ibd_sample_scores(const EmbeddingVector& a, const ClassDecomposition& decomposition,
                                      const ConceptBasis& basis) {
  const double logit = class_logit(a, decomposition);
  std::vector<double> scores(decomposition.coefficients.size(), 0.0);
  for (std::size_t j = 0; j < scores.size(); ++j) {
    const double s = decomposition.coefficients[j];
    if (s != 0.0) scores[j] = s * basis.vectors.col(static_cast<Eigen::Index>(j)).dot(a.view()) / logit;
  }
  return scores;
}

double ibd_residual_term(const EmbeddingVector& a, const ClassDecomposition& decomposition) {
  const double logit = class_logit(a, decomposition);
  return decomposition.residual.dot(a.view()) / logit;
}

std::vector<double> clamp_negative_scores(std::span<const double> scores) {
  std::vector<double> out(scores.begin(), scores.end());
  for (double& v : out) v = std::max(v, 0.0);
  return out;
}

std::vector<double> ibd_class_scores(const ClassDecomposition& decomposition, const ConceptBasis& basis) {
  std::vector<double> out(decomposition.coefficients.size(), 0.0);
  const double norm2 = decomposition.class_weights.squaredNorm();
  if (norm2 == 0.0) return out;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double s = decomposition.coefficients[j];
    if (s != 0.0) {
      out[j] = s * basis.vectors.col(static_cast<Eigen::Index>(j)).dot(decomposition.class_weights) / norm2;
    }
  }
  return out;
}

}  // namespace copronn
