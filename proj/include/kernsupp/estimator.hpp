#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Cholesky>

#include "kernsupp/filters.hpp"
#include "kernsupp/kernels.hpp"
#include "kernsupp/types.hpp"

namespace kernsupp {

/// How F_n is evaluated. Auto picks the direct solve for Tikhonov, the
/// iteration for Landweber and the eigendecomposition otherwise.
enum class Algorithm { Auto, Spectral, Cholesky, Landweber };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view text);

/// Eigenvalues at or below this fraction of the largest one are treated as
/// zero by the truncating filters and by the pseudo-inverse.
inline constexpr double kRankTolerance = 1e-12;

/// Fitted support estimator
///
///   F_n(x) = (1/n) K_x^T g(K_n / n) K_x,   X_n = { x : F_n(x) >= 1 - tau }.
///
/// Immutable after fit; scoring is const and thread-safe.
class SupportModel {
public:
  const PointMatrix& training_points() const { return points_; }
  const KernelSpec& kernel() const { return kernel_; }
  const FilterSpec& filter() const { return filter_; }
  double tau() const { return tau_; }
  Algorithm algorithm() const { return algorithm_; }
  const GramMatrix& gram() const { return gram_; }
  const SpectralDecomposition& decomposition() const { return decomposition_; }
  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dimension() const { return points_.cols(); }

  /// Same training data and decomposition, different filter.
  SupportModel with_filter(const FilterSpec& filter, Algorithm algorithm = Algorithm::Auto) const;
  SupportModel with_tau(double tau) const;

  /// Rebuilds a model from persisted parts. The decomposition is recomputed
  /// when `decomposition` is empty.
  static SupportModel assemble(PointMatrix points, const KernelSpec& kernel,
                               const FilterSpec& filter, Algorithm algorithm, double tau,
                               SpectralDecomposition decomposition = {});

private:
  SupportModel(PointMatrix points, KernelSpec kernel, FilterSpec filter, Algorithm algorithm,
               double tau, GramMatrix gram, SpectralDecomposition decomposition);

  friend Vector score_batch(const SupportModel&, PointMatrixRef, Algorithm);

  PointMatrix points_;
  KernelSpec kernel_;
  FilterSpec filter_;
  double tau_;
  Algorithm algorithm_;
  GramMatrix gram_;
  SpectralDecomposition decomposition_;
  std::shared_ptr<const Eigen::LLT<Matrix>> cholesky_;
};

/// Fits the estimator. The kernel must have unit diagonal (wrap it in
/// normalize() otherwise).
SupportModel fit(PointMatrixRef points, const KernelSpec& kernel, const FilterSpec& filter,
                 Algorithm algorithm = Algorithm::Auto, double tau = 0.0,
                 std::size_t max_points = kDefaultMaxGramSize);

double score(const SupportModel& model, PointRef x);

/// Scores N points with one n x N cross-Gram assembly. `algorithm`
/// overrides the model's evaluation path when not Auto.
Vector score_batch(const SupportModel& model, PointMatrixRef points,
                   Algorithm algorithm = Algorithm::Auto);

/// true iff F_n(x) >= 1 - tau, with tau in [0, 1).
bool predict_member(const SupportModel& model, PointRef x, double tau);
bool predict_member(const SupportModel& model, PointRef x);
bool is_member(double score, double tau);

/// Solves (K_n + n lambda I) alpha = k_x by Cholesky.
Vector tikhonov_coefficients(const GramMatrix& g, const Vector& k_x, double lambda);

/// alpha^0 = 0, alpha^t = alpha^{t-1} + (K_x - K_n alpha^{t-1}) / n for
/// t = 1..m+1, i.e. alpha = (1/n) g_m(K_n/n) K_x.
Vector landweber_coefficients(const GramMatrix& g, const Vector& k_x, int iterations);

/// Scores (rows: points, columns: filters) for several filters from one
/// decomposition.
Matrix regularization_path(const SupportModel& model, PointMatrixRef points,
                           std::span<const FilterSpec> filters);

/// Same, varying lambda within the model's filter family.
Matrix regularization_path(const SupportModel& model, PointMatrixRef points,
                           std::span<const double> lambdas);

/// Midpoint of the M-th and (M+1)-th distinct positive eigenvalues.
double kpca_lambda_from_rank(const SpectralDecomposition& d, std::size_t rank);

/// Replaces a rank-specified kPCA filter with its lambda form.
FilterSpec resolve_filter(const FilterSpec& f, const SpectralDecomposition& d);

/// g(s_j) for every eigenvalue, with eigenvalues below the rank tolerance
/// dropped for the truncating filters.
Vector filter_weights(const FilterSpec& f, const SpectralDecomposition& d);

}  // namespace kernsupp
