#pragma once

#include <cstddef>

#include "kernsupp/types.hpp"

namespace kernsupp {

/// Median over the training points of the Euclidean distance to the k-th
/// nearest other point. An even count takes the mean of the two middle
/// values. Throws when n <= k or when the result is 0 (duplicated data).
double width_heuristic(PointMatrixRef points, std::size_t k = 10);

/// Regularization parameter at the kink of the eigenvalue decay: the
/// eigenvalue maximizing the second difference of log10(sigma_j) over the
/// interior of the positive spectrum (> 1e-12), smallest index on ties.
double lambda_curvature(const Vector& eigenvalues_descending);

/// Index chosen by lambda_curvature.
Eigen::Index curvature_index(const Vector& eigenvalues_descending);

/// (1/n)^(1/(2s+b+1)), with s in (0,1] and b in [0,1].
double rate_lambda(double n, double s, double b);

/// Predicted error rate n^(-s/(2s+b+1)) for the same schedule.
double rate_error(double n, double s, double b);

}  // namespace kernsupp
