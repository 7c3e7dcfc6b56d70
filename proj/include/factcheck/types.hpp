#pragma once

#include <Eigen/Core>

namespace factcheck {

// Row-major so that a row (one timestep, one token, one output unit) is
// contiguous; the kernels rely on this.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace factcheck
