#pragma once

#include <Eigen/Core>

namespace copronn {

/// argmin_{x >= 0} ||A x - b||_2 by the Lawson-Hanson active-set method.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace copronn
