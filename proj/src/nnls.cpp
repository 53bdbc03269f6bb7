#include "copronn/nnls.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/QR>

#include "copronn/error.hpp"

namespace copronn {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
  }
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
  const Eigen::VectorXd z = sub.colPivHouseholderQr().solve(b);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(a.cols());
  for (std::size_t c = 0; c < cols.size(); ++c) full[cols[c]] = z[static_cast<Eigen::Index>(c)];
  return full;
}

}  // namespace

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != b.size()) fail(ErrorKind::DimensionMismatch, "nnls: A and b disagree in row count");
  const Eigen::Index n = a.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (n == 0) return x;

  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * a.cwiseAbs().colwise().sum().maxCoeff() *
                     static_cast<double>(std::max(a.rows(), n)) * std::max(1.0, b.cwiseAbs().maxCoeff());
  const int max_outer = 3 * static_cast<int>(n) + 10;

  Eigen::VectorXd grad = a.transpose() * (b - a * x);
  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::Index best = -1;
    double best_value = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && grad[j] > best_value) {
        best_value = grad[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    Eigen::VectorXd z = solve_passive(a, b, passive);
    for (int inner = 0; inner < max_outer; ++inner) {
      bool feasible = true;
      double step = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
          feasible = false;
          const double denom = x[j] - z[j];
          if (denom > 0.0) step = std::min(step, x[j] / denom);
        }
      }
      if (feasible) break;
      x += step * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
      z = solve_passive(a, b, passive);
    }
    x = z;
    // a column that just re-entered with a non-positive solution cannot improve the fit
    if (x[best] <= 0.0) {
      x[best] = 0.0;
      passive[static_cast<std::size_t>(best)] = false;
      break;
    }
    grad = a.transpose() * (b - a * x);
  }
  return x;
}

}  // namespace copronn
