#include "kernsupp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kernsupp/error.hpp"
#include "kernsupp/format.hpp"

namespace kernsupp {

namespace {

constexpr double kPositiveEigenvalue = 1e-12;
// Second differences closer than this count as ties.
constexpr double kCurvatureTie = 1e-12;

double median(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

void check_rate_params(double n, double s, double b) {
  if (!(n >= 1.0)) throw UsageError("rate schedule needs n >= 1");
  if (!(s > 0.0 && s <= 1.0)) throw UsageError("source exponent s must lie in (0, 1]");
  if (!(b >= 0.0 && b <= 1.0)) throw UsageError("capacity exponent b must lie in [0, 1]");
}

}  // namespace

double width_heuristic(PointMatrixRef points, std::size_t k) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k < 1) throw UsageError("width heuristic needs k >= 1");
  if (n <= k) {
    throw UsageError("width heuristic needs more than k=" + std::to_string(k) + " points, got " +
                     std::to_string(n));
  }
  std::vector<double> kth(n);
  std::vector<double> dist(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dist[c++] = (points.row(static_cast<Eigen::Index>(i)) - points.row(static_cast<Eigen::Index>(j))).norm();
    }
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    kth[i] = dist[k - 1];
  }
  const double sigma = median(std::move(kth));
  if (!(sigma > 0.0)) {
    throw UsageError("width heuristic returned sigma=0 (duplicated training points?)");
  }
  return sigma;
}

Eigen::Index curvature_index(const Vector& eigenvalues) {
  std::vector<double> logs;
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
    if (!(eigenvalues(j) > kPositiveEigenvalue)) break;
    logs.push_back(std::log10(eigenvalues(j)));
  }
  if (logs.size() < 3) {
    throw UsageError("curvature heuristic needs at least 3 positive eigenvalues, got " +
                     std::to_string(logs.size()));
  }
  std::size_t best = 1;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j + 1 < logs.size(); ++j) {
    const double curvature = logs[j - 1] - 2.0 * logs[j] + logs[j + 1];
    if (curvature > best_value + kCurvatureTie) {
      best_value = curvature;
      best = j;
    }
  }
  return static_cast<Eigen::Index>(best);
}

double lambda_curvature(const Vector& eigenvalues) {
  return eigenvalues(curvature_index(eigenvalues));
}

double rate_lambda(double n, double s, double b) {
  check_rate_params(n, s, b);
  return std::pow(1.0 / n, 1.0 / (2.0 * s + b + 1.0));
}

double rate_error(double n, double s, double b) {
  check_rate_params(n, s, b);
  return std::pow(n, -s / (2.0 * s + b + 1.0));
}

}  // namespace kernsupp
