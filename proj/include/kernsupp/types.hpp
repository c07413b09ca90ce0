#pragma once

#include <Eigen/Core>

namespace kernsupp {

/// A single point in R^d.
using Point = Eigen::VectorXd;
using PointRef = Eigen::Ref<const Eigen::VectorXd>;

/// n points in R^d stored one per row. Row-major so that each row is a
/// contiguous vector and numpy arrays map onto it without copies.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using PointMatrixRef = Eigen::Ref<const PointMatrix>;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace kernsupp
