#pragma once

#include <Eigen/SVD>

#include "kernsupp/filters.hpp"
#include "kernsupp/kernels.hpp"
#include "kernsupp/types.hpp"

namespace kernsupp {

/// T_n = (1/n) sum_i K_{x_i} (x) K_{x_i}, represented through its sample.
/// All Hilbert-Schmidt quantities reduce to sums of squared kernel values.
class EmpiricalOperator {
public:
  EmpiricalOperator(PointMatrix sample, KernelSpec kernel);

  const PointMatrix& sample() const { return sample_; }
  const KernelSpec& kernel() const { return kernel_; }
  Eigen::Index size() const { return sample_.rows(); }

  /// |T_n|_HS^2 = (1/n^2) sum_ij K(x_i, x_j)^2, computed at construction.
  double hs_norm_squared() const { return hs_norm_squared_; }
  /// tr T_n = (1/n) sum_i K(x_i, x_i).
  double trace() const;

private:
  PointMatrix sample_;
  KernelSpec kernel_;
  double hs_norm_squared_ = 0.0;
};

/// <T_a, T_b>_HS = (1/(n m)) sum_ij K(x_i, y_j)^2.
double hs_inner(const EmpiricalOperator& a, const EmpiricalOperator& b);

/// |T_a - T_b|_HS, exact, without any eigendecomposition.
double hs_distance(const EmpiricalOperator& a, const EmpiricalOperator& b);

/// 2 max(delta, sqrt(2 delta)) / sqrt(n); holds w.p. >= 1 - 2 exp(-delta).
double concentration_bound(double n, double delta);

/// N(lambda) = sum_j s_j / (s_j + lambda) over the positive eigenvalues.
double effective_dimension(const Vector& eigenvalues, double lambda);
double effective_dimension(const SpectralDecomposition& d, double lambda);

/// delta / (n lambda) + sqrt(2 delta N(lambda) / (n lambda)).
double sample_error_bound(double n, double lambda, double delta, double effective_dim);

/// lambda^s C_s.
double approximation_error_bound(double lambda, double s, double c_s);

/// max(C_s, 2 D_b max(delta, sqrt(2 delta))) n^(-s/(2s+b+1)).
///
/// Uses the constant obtained by adding the sample and approximation terms
/// at the balancing lambda. The tighter-looking max(C_s, D_b max(2 delta,
/// sqrt(2 delta))) is not what that argument yields.
double finite_sample_bound(double n, double delta, double s, double b, double c_s, double d_b);

/// M delta / n + sqrt(2 sigma^2 delta / n).
double bernstein_bound(double m, double variance, double n, double delta);

struct MaurerResult {
  double lhs = 0.0;  ///< |r(S) - r(T)|_F
  double rhs = 0.0;  ///< L |S - T|_F
  bool holds(double relative_slack = 1e-10) const { return lhs <= rhs * (1.0 + relative_slack); }
};

/// Evaluates both sides of |r(S) - r(T)|_F <= L |S - T|_F for symmetric S, T
/// with spectra in [0, 1] and a Lipschitz filter.
MaurerResult maurer_check(const Matrix& s, const Matrix& t, const FilterSpec& f);

/// k_x^T K_n^+ k_x with a tolerance-rank pseudo-inverse computed from an
/// SVD of K_n (independent of the eigendecomposition used by the
/// estimator). This is the finite-sample projection score.
class ProjectionOracle {
public:
  explicit ProjectionOracle(const GramMatrix& g);
  double score(const Vector& k_x) const;
  Eigen::Index rank() const { return rank_; }

private:
  Matrix u_;
  Matrix v_;
  Vector inverse_singular_values_;
  Eigen::Index rank_ = 0;
};

double exact_projection_score(const GramMatrix& g, const Vector& k_x);

}  // namespace kernsupp
