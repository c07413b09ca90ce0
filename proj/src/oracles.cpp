#include "kernsupp/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "kernsupp/error.hpp"
#include "kernsupp/format.hpp"

namespace kernsupp {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw UsageError(std::string(what) + " must be positive, got " + format_real(v));
  }
}

// sum_{i,j} K(a_i, b_j)^2
double sum_squared_kernel(const KernelSpec& k, PointMatrixRef a, PointMatrixRef b) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const PointRef x = a.row(i).transpose();
    double row = 0.0;
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      const double v = k(x, b.row(j).transpose());
      row += v * v;
    }
    total += row;
  }
  return total;
}

}  // namespace

EmpiricalOperator::EmpiricalOperator(PointMatrix sample, KernelSpec kernel)
    : sample_(std::move(sample)), kernel_(std::move(kernel)) {
  if (sample_.rows() == 0) throw DataError("empirical operator needs a nonempty sample");
  validate_points(kernel_, sample_);
  // Symmetric sum: diagonal once, strict lower triangle twice.
  double total = 0.0;
  for (Eigen::Index i = 0; i < sample_.rows(); ++i) {
    const PointRef x = sample_.row(i).transpose();
    const double diag = kernel_(x, x);
    double row = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = kernel_(x, sample_.row(j).transpose());
      row += v * v;
    }
    total += diag * diag + 2.0 * row;
  }
  const double n = static_cast<double>(sample_.rows());
  hs_norm_squared_ = total / (n * n);
}

double EmpiricalOperator::trace() const {
  double t = 0.0;
  for (Eigen::Index i = 0; i < sample_.rows(); ++i) {
    const PointRef x = sample_.row(i).transpose();
    t += kernel_(x, x);
  }
  return t / static_cast<double>(sample_.rows());
}

double hs_inner(const EmpiricalOperator& a, const EmpiricalOperator& b) {
  if (!(a.kernel() == b.kernel())) throw UsageError("empirical operators use different kernels");
  if (a.sample().cols() != b.sample().cols()) throw DataError("samples differ in dimension");
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  return sum_squared_kernel(a.kernel(), a.sample(), b.sample()) / (n * m);
}

double hs_distance(const EmpiricalOperator& a, const EmpiricalOperator& b) {
  const double sq = a.hs_norm_squared() + b.hs_norm_squared() - 2.0 * hs_inner(a, b);
  return std::sqrt(std::max(0.0, sq));
}

double concentration_bound(double n, double delta) {
  if (!(n >= 1.0)) throw UsageError("concentration bound needs n >= 1");
  require_positive(delta, "delta");
  return 2.0 * std::max(delta, std::sqrt(2.0 * delta)) / std::sqrt(n);
}

double effective_dimension(const Vector& eigenvalues, double lambda) {
  require_positive(lambda, "lambda");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
    const double s = eigenvalues(j);
    if (s > 0.0) sum += s / (s + lambda);
  }
  return sum;
}

double effective_dimension(const SpectralDecomposition& d, double lambda) {
  return effective_dimension(d.eigenvalues, lambda);
}

double sample_error_bound(double n, double lambda, double delta, double effective_dim) {
  require_positive(n, "n");
  require_positive(lambda, "lambda");
  require_positive(delta, "delta");
  if (!(effective_dim >= 0.0)) throw UsageError("effective dimension must be >= 0");
  const double nl = n * lambda;
  return delta / nl + std::sqrt(2.0 * delta * effective_dim / nl);
}

double approximation_error_bound(double lambda, double s, double c_s) {
  require_positive(lambda, "lambda");
  if (!(s > 0.0 && s <= 1.0)) throw UsageError("source exponent s must lie in (0, 1]");
  require_positive(c_s, "C_s");
  return std::pow(lambda, s) * c_s;
}

double finite_sample_bound(double n, double delta, double s, double b, double c_s, double d_b) {
  if (!(n >= 1.0)) throw UsageError("finite-sample bound needs n >= 1");
  require_positive(delta, "delta");
  if (!(s > 0.0 && s <= 1.0)) throw UsageError("source exponent s must lie in (0, 1]");
  if (!(b >= 0.0 && b <= 1.0)) throw UsageError("capacity exponent b must lie in [0, 1]");
  require_positive(c_s, "C_s");
  if (!(d_b >= 1.0)) throw UsageError("D_b must be >= 1");
  const double constant = std::max(c_s, 2.0 * d_b * std::max(delta, std::sqrt(2.0 * delta)));
  return constant * std::pow(n, -s / (2.0 * s + b + 1.0));
}

double bernstein_bound(double m, double variance, double n, double delta) {
  require_positive(m, "M");
  require_positive(variance, "sigma^2");
  require_positive(n, "n");
  require_positive(delta, "delta");
  return m * delta / n + std::sqrt(2.0 * variance * delta / n);
}

MaurerResult maurer_check(const Matrix& s, const Matrix& t, const FilterSpec& f) {
  const auto lipschitz = lipschitz_constant(f);
  if (!lipschitz) throw UsageError("Maurer check needs a Lipschitz filter");
  if (s.rows() != t.rows() || s.cols() != t.cols()) throw DataError("matrices differ in shape");
  const Matrix rs = apply_r(f, decompose_symmetric(s));
  const Matrix rt = apply_r(f, decompose_symmetric(t));
  return {(rs - rt).norm(), *lipschitz * (s - t).norm()};
}

ProjectionOracle::ProjectionOracle(const GramMatrix& g) {
  Eigen::JacobiSVD<Matrix> svd(g.matrix(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = 1e-12 * (sv.size() ? sv(0) : 0.0);
  rank_ = 0;
  while (rank_ < sv.size() && sv(rank_) > cutoff) ++rank_;
  u_ = svd.matrixU().leftCols(rank_);
  v_ = svd.matrixV().leftCols(rank_);
  inverse_singular_values_ = sv.head(rank_).cwiseInverse();
}

double ProjectionOracle::score(const Vector& k_x) const {
  if (k_x.size() != u_.rows()) throw DataError("kernel column length does not match the Gram matrix");
  const Vector left = u_.transpose() * k_x;
  const Vector right = v_.transpose() * k_x;
  return (left.cwiseProduct(right).cwiseProduct(inverse_singular_values_)).sum();
}

double exact_projection_score(const GramMatrix& g, const Vector& k_x) {
  return ProjectionOracle(g).score(k_x);
}

}  // namespace kernsupp
