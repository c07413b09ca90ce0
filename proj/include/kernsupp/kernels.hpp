#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kernsupp/types.hpp"

namespace kernsupp {

/// Documented separation status of a kernel family.
///
/// Complete: the RKHS separates every closed set (Abel, l1-exponential and
/// products of those). LinearManifolds: only linear subspaces can be
/// recovered (linear kernel). None: analytic RKHS, cannot separate general
/// closed sets (Gaussian).
enum class Separation { Complete, LinearManifolds, None };

std::string to_string(Separation s);

/// Half-open coordinate range [begin, end) a product factor acts on.
struct CoordinateSlice {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const CoordinateSlice&) const = default;
};

class KernelSpec;

struct ProductFactor {
  std::shared_ptr<const KernelSpec> kernel;
  CoordinateSlice slice;
};

/// Declarative description of a real positive-definite kernel on R^d.
///
/// Instances are immutable; copying is cheap (compound kernels share their
/// children).
class KernelSpec {
public:
  enum class Kind { Abel, L1Exponential, Gaussian, Linear, Product, Normalized };

  /// exp(-|x-y|_2 / sigma)
  static KernelSpec abel(double sigma);
  /// exp(-|x-y|_1 / sigma)
  static KernelSpec l1_exponential(double sigma);
  /// exp(-|x-y|_2^2 / sigma^2)
  static KernelSpec gaussian(double sigma);
  /// x^T y
  static KernelSpec linear();

  /// Text form `kernel=<kind> [sigma=<v>] [inner=<expr>] [factors=<expr>*...]`
  /// or a bare compact expression such as `product(abel(1)[0:1]*abel(2)[1:2])`.
  static KernelSpec parse(std::string_view text);

  Kind kind() const { return kind_; }
  bool has_bandwidth() const;
  /// Bandwidth of Abel, L1Exponential and Gaussian kernels.
  double sigma() const;
  /// Same kernel with a new bandwidth (bandwidth kinds only).
  KernelSpec with_sigma(double sigma) const;

  bool unit_diagonal() const { return unit_diagonal_; }
  Separation separation() const;

  /// Required input dimension, if fixed (products know theirs).
  std::optional<std::size_t> dimension() const;

  const std::vector<ProductFactor>& factors() const { return factors_; }
  /// Wrapped kernel of a Normalized spec.
  const KernelSpec& inner() const;

  /// Evaluates K(x, y) without validating inputs.
  double operator()(PointRef x, PointRef y) const;

  /// `kernel=abel sigma=0.5`
  std::string to_string() const;
  /// `abel(0.5)`
  std::string expression() const;

  bool operator==(const KernelSpec& other) const;

private:
  KernelSpec() = default;

  friend KernelSpec normalize(const KernelSpec& k);
  friend KernelSpec product_kernel(std::vector<std::pair<KernelSpec, CoordinateSlice>> factors);

  Kind kind_ = Kind::Linear;
  double sigma_ = 0.0;
  bool unit_diagonal_ = false;
  std::vector<ProductFactor> factors_;
  std::shared_ptr<const KernelSpec> inner_;
};

/// Checked evaluation: dimensions must agree and coordinates be finite.
double kernel_eval(const KernelSpec& k, PointRef x, PointRef y);

/// d_K(x, y) = sqrt(K(x,x) + K(y,y) - 2 K(x,y)).
/// Throws NumericError when the radicand is negative beyond round-off.
double induced_metric(const KernelSpec& k, PointRef x, PointRef y);

/// K(x,y) / sqrt(K(x,x) K(y,y)). Unit-diagonal kernels are returned as is,
/// which makes normalize idempotent.
KernelSpec normalize(const KernelSpec& k);

/// Product of factors, each evaluated on its own coordinate slice. The
/// slices must partition [0, d).
KernelSpec product_kernel(std::vector<std::pair<KernelSpec, CoordinateSlice>> factors);

/// PSD slack, relative to the matrix 1-norm.
inline constexpr double kPsdTolerance = 1e-10;
/// Default cap on the number of points in a Gram matrix (n^2 doubles).
inline constexpr std::size_t kDefaultMaxGramSize = 12000;

/// Symmetric n x n matrix of kernel values over a point set.
class GramMatrix {
public:
  GramMatrix() = default;
  explicit GramMatrix(Matrix entries);

  const Matrix& matrix() const { return entries_; }
  Eigen::Index size() const { return entries_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

private:
  Matrix entries_;
};

/// Assembles (K_n)_ij = K(x_i, x_j). Only the lower triangle is evaluated;
/// unit-diagonal kernels get an exact unit diagonal.
GramMatrix gram(const KernelSpec& k, PointMatrixRef points,
                std::size_t max_points = kDefaultMaxGramSize);

/// n x N matrix with entry (i, j) = K(train_i, test_j).
Matrix cross_gram(const KernelSpec& k, PointMatrixRef train, PointMatrixRef test);

/// Kernel column K_x = (K(x_1, x), ..., K(x_n, x)).
Vector kernel_column(const KernelSpec& k, PointMatrixRef train, PointRef x);

/// Smallest eigenvalue of the Gram matrix.
double min_eigenvalue(const GramMatrix& g);

/// Eigenvalues >= -n * eps * |G|_1.
bool is_psd(const GramMatrix& g, double eps = kPsdTolerance);

/// Throws DataError unless all points have the dimension the kernel expects
/// and finite coordinates.
void validate_points(const KernelSpec& k, PointMatrixRef points);

}  // namespace kernsupp
