#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "kernsupp/kernels.hpp"
#include "kernsupp/types.hpp"

namespace kernsupp {

/// Spectral filter r(sigma) = sigma * g(sigma) acting on the spectrum of
/// K_n / n, which lies in [0, 1] for unit-diagonal kernels.
class FilterSpec {
public:
  enum class Kind { Tikhonov, SpectralCutoff, Landweber, KpcaTruncation };

  static FilterSpec tikhonov(double lambda);
  static FilterSpec spectral_cutoff(double lambda);
  static FilterSpec landweber(int iterations);
  /// Keeps eigenvalues >= lambda.
  static FilterSpec kpca(double lambda);
  /// Keeps the top `rank` distinct eigenvalues; needs a spectrum to resolve.
  static FilterSpec kpca_rank(std::size_t rank);

  /// `filter=tikhonov lambda=1e-3`, `filter=cutoff lambda=..`,
  /// `filter=landweber m=50`, `filter=kpca lambda=..` or `filter=kpca rank=5`.
  static FilterSpec parse(std::string_view text);

  Kind kind() const { return kind_; }
  /// Regularization parameter; throws for Landweber and unresolved kPCA.
  double lambda() const;
  int iterations() const;
  std::optional<std::size_t> rank() const { return rank_; }
  /// False only for a kPCA filter given by rank and not yet resolved.
  bool resolved() const;
  bool lipschitz() const { return kind_ != Kind::KpcaTruncation; }

  /// Same family with another lambda (not Landweber).
  FilterSpec with_lambda(double lambda) const;

  std::string name() const;
  std::string to_string() const;

  bool operator==(const FilterSpec&) const = default;

private:
  FilterSpec() = default;

  Kind kind_ = Kind::Tikhonov;
  double lambda_ = 0.0;
  int iterations_ = 0;
  std::optional<std::size_t> rank_;
};

/// Inputs may stray this far outside [0, 1] before being rejected; inside
/// the slack they are clamped.
inline constexpr double kSpectrumTolerance = 1e-8;

double r_value(const FilterSpec& f, double sigma);
double g_value(const FilterSpec& f, double sigma);

/// Tikhonov and cutoff: 1/lambda. Landweber: m + 1. kPCA: none.
std::optional<double> lipschitz_constant(const FilterSpec& f);

/// Eigenpairs of a symmetric matrix with spectrum in [0, 1], sorted
/// descending; eigenvectors are the columns.
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
  /// Largest amount any eigenvalue was moved by clamping into [0, 1].
  double clamped = 0.0;

  Eigen::Index size() const { return eigenvalues.size(); }
};

/// Decomposes K_n / n.
SpectralDecomposition decompose(const GramMatrix& g);

/// Decomposes a symmetric matrix whose spectrum lies in [0, 1].
SpectralDecomposition decompose_symmetric(const Matrix& a);

/// V diag(r(s)) V^T.
Matrix apply_r(const FilterSpec& f, const SpectralDecomposition& d);
/// V diag(g(s)) V^T.
Matrix apply_g(const FilterSpec& f, const SpectralDecomposition& d);

}  // namespace kernsupp
