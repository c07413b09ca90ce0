#include "kernsupp/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "kernsupp/error.hpp"
#include "kernsupp/format.hpp"

namespace kernsupp {

namespace {

// Eigenvalues closer than this (relative to the largest) count as one
// distinct value when ranking kPCA components.
constexpr double kDistinctTolerance = 1e-10;

Algorithm resolve_algorithm(const FilterSpec& f, Algorithm requested) {
  if (requested == Algorithm::Auto) {
    switch (f.kind()) {
      case FilterSpec::Kind::Tikhonov: return Algorithm::Cholesky;
      case FilterSpec::Kind::Landweber: return Algorithm::Landweber;
      default: return Algorithm::Spectral;
    }
  }
  if (requested == Algorithm::Cholesky && f.kind() != FilterSpec::Kind::Tikhonov) {
    throw UsageError("the direct solve only applies to the Tikhonov filter");
  }
  if (requested == Algorithm::Landweber && f.kind() != FilterSpec::Kind::Landweber) {
    throw UsageError("the Landweber iteration only applies to the Landweber filter");
  }
  return requested;
}

Eigen::LLT<Matrix> factor_tikhonov(const GramMatrix& g, double lambda) {
  const auto n = g.size();
  Matrix a = g.matrix();
  a.diagonal().array() += static_cast<double>(n) * lambda;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericError("Cholesky factorization of K_n + n*lambda failed (lambda=" +
                       format_real(lambda) + ")");
  }
  return llt;
}

double clamp_score(double v) { return std::clamp(v, 0.0, 1.0); }

Vector spectral_scores(const SpectralDecomposition& d, const Vector& weights, const Matrix& kx) {
  const Matrix c = d.eigenvectors.transpose() * kx;
  const double n = static_cast<double>(d.size());
  Vector out(kx.cols());
  for (Eigen::Index j = 0; j < kx.cols(); ++j) {
    out(j) = clamp_score(weights.dot(c.col(j).cwiseAbs2()) / n);
  }
  return out;
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Auto: return "auto";
    case Algorithm::Spectral: return "spectral";
    case Algorithm::Cholesky: return "cholesky";
    case Algorithm::Landweber: return "landweber";
  }
  return {};
}

Algorithm parse_algorithm(std::string_view text) {
  if (text == "auto") return Algorithm::Auto;
  if (text == "spectral") return Algorithm::Spectral;
  if (text == "cholesky") return Algorithm::Cholesky;
  if (text == "landweber") return Algorithm::Landweber;
  throw UsageError("unknown algorithm '" + std::string(text) + "'");
}

SupportModel::SupportModel(PointMatrix points, KernelSpec kernel, FilterSpec filter,
                           Algorithm algorithm, double tau, GramMatrix gram,
                           SpectralDecomposition decomposition)
    : points_(std::move(points)),
      kernel_(std::move(kernel)),
      filter_(std::move(filter)),
      tau_(tau),
      algorithm_(algorithm),
      gram_(std::move(gram)),
      decomposition_(std::move(decomposition)) {
  if (!(tau_ >= 0.0 && tau_ < 1.0)) {
    throw UsageError("threshold tau must lie in [0, 1), got " + format_real(tau_));
  }
  if (algorithm_ == Algorithm::Cholesky) {
    cholesky_ = std::make_shared<const Eigen::LLT<Matrix>>(factor_tikhonov(gram_, filter_.lambda()));
  }
}

SupportModel SupportModel::assemble(PointMatrix points, const KernelSpec& kernel,
                                    const FilterSpec& filter, Algorithm algorithm, double tau,
                                    SpectralDecomposition decomposition) {
  if (!kernel.unit_diagonal()) {
    throw UsageError("support estimation needs a unit-diagonal kernel; wrap '" +
                     kernel.expression() + "' in normalized(...)");
  }
  if (points.rows() == 0) throw DataError("cannot fit on an empty training set");
  GramMatrix g = kernsupp::gram(kernel, points,
                                std::max(static_cast<std::size_t>(points.rows()), kDefaultMaxGramSize));
  if (decomposition.size() == 0) {
    decomposition = decompose(g);
  } else if (decomposition.size() != g.size() || decomposition.eigenvectors.rows() != g.size()) {
    throw DataError("stored decomposition does not match the training set size");
  }
  const FilterSpec resolved = resolve_filter(filter, decomposition);
  const Algorithm a = resolve_algorithm(resolved, algorithm);
  return SupportModel(std::move(points), kernel, resolved, a, tau, std::move(g),
                      std::move(decomposition));
}

SupportModel SupportModel::with_filter(const FilterSpec& filter, Algorithm algorithm) const {
  const FilterSpec resolved = resolve_filter(filter, decomposition_);
  return SupportModel(points_, kernel_, resolved, resolve_algorithm(resolved, algorithm), tau_,
                      gram_, decomposition_);
}

SupportModel SupportModel::with_tau(double tau) const {
  SupportModel copy = *this;
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw UsageError("threshold tau must lie in [0, 1), got " + format_real(tau));
  }
  copy.tau_ = tau;
  return copy;
}

SupportModel fit(PointMatrixRef points, const KernelSpec& kernel, const FilterSpec& filter,
                 Algorithm algorithm, double tau, std::size_t max_points) {
  if (static_cast<std::size_t>(points.rows()) > max_points) {
    throw DataError("fit: " + std::to_string(points.rows()) +
                    " points exceed the configured cap of " + std::to_string(max_points));
  }
  return SupportModel::assemble(PointMatrix(points), kernel, filter, algorithm, tau);
}

Vector filter_weights(const FilterSpec& f, const SpectralDecomposition& d) {
  Vector w(d.size());
  const double cutoff = kRankTolerance * (d.size() ? d.eigenvalues(0) : 0.0);
  const bool truncating = f.kind() == FilterSpec::Kind::SpectralCutoff ||
                          f.kind() == FilterSpec::Kind::KpcaTruncation;
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    const double s = d.eigenvalues(j);
    w(j) = (truncating && s <= cutoff) ? 0.0 : g_value(f, s);
  }
  return w;
}

Vector score_batch(const SupportModel& model, PointMatrixRef points, Algorithm algorithm) {
  if (points.rows() == 0) return Vector(0);
  const Algorithm a =
      algorithm == Algorithm::Auto ? model.algorithm() : resolve_algorithm(model.filter(), algorithm);
  const Matrix kx = cross_gram(model.kernel(), model.training_points(), points);
  const double n = static_cast<double>(model.size());

  switch (a) {
    case Algorithm::Spectral:
    case Algorithm::Auto:
      return spectral_scores(model.decomposition(), filter_weights(model.filter(), model.decomposition()), kx);
    case Algorithm::Cholesky: {
      const Eigen::LLT<Matrix> local =
          model.cholesky_ ? Eigen::LLT<Matrix>() : factor_tikhonov(model.gram(), model.filter().lambda());
      const Eigen::LLT<Matrix>& llt = model.cholesky_ ? *model.cholesky_ : local;
      const Matrix alpha = llt.solve(kx);
      Vector out(kx.cols());
      for (Eigen::Index j = 0; j < kx.cols(); ++j) out(j) = clamp_score(alpha.col(j).dot(kx.col(j)));
      return out;
    }
    case Algorithm::Landweber: {
      Matrix alpha = Matrix::Zero(kx.rows(), kx.cols());
      for (int t = 0; t <= model.filter().iterations(); ++t) {
        alpha += (kx - model.gram().matrix() * alpha) / n;
      }
      Vector out(kx.cols());
      for (Eigen::Index j = 0; j < kx.cols(); ++j) out(j) = clamp_score(alpha.col(j).dot(kx.col(j)));
      return out;
    }
  }
  return Vector(0);
}

double score(const SupportModel& model, PointRef x) {
  PointMatrix one(1, x.size());
  one.row(0) = x.transpose();
  return score_batch(model, one)(0);
}

bool is_member(double score, double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw UsageError("threshold tau must lie in [0, 1), got " + format_real(tau));
  }
  return score >= 1.0 - tau;
}

bool predict_member(const SupportModel& model, PointRef x, double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw UsageError("threshold tau must lie in [0, 1), got " + format_real(tau));
  }
  return is_member(score(model, x), tau);
}

bool predict_member(const SupportModel& model, PointRef x) {
  return predict_member(model, x, model.tau());
}

Vector tikhonov_coefficients(const GramMatrix& g, const Vector& k_x, double lambda) {
  if (!(lambda > 0.0)) throw UsageError("lambda must be positive");
  if (k_x.size() != g.size()) throw DataError("kernel column length does not match the Gram matrix");
  return factor_tikhonov(g, lambda).solve(k_x);
}

Vector landweber_coefficients(const GramMatrix& g, const Vector& k_x, int iterations) {
  if (iterations < 0) throw UsageError("Landweber iteration count must be >= 0");
  if (k_x.size() != g.size()) throw DataError("kernel column length does not match the Gram matrix");
  const double n = static_cast<double>(g.size());
  Vector alpha = Vector::Zero(k_x.size());
  for (int t = 0; t <= iterations; ++t) alpha += (k_x - g.matrix() * alpha) / n;
  return alpha;
}

Matrix regularization_path(const SupportModel& model, PointMatrixRef points,
                           std::span<const FilterSpec> filters) {
  if (filters.empty()) throw UsageError("regularization path needs at least one filter");
  const auto& d = model.decomposition();
  const Matrix kx = cross_gram(model.kernel(), model.training_points(), points);
  const Matrix c2 = (d.eigenvectors.transpose() * kx).cwiseAbs2();
  const double n = static_cast<double>(model.size());
  Matrix out(points.rows(), static_cast<Eigen::Index>(filters.size()));
  for (std::size_t l = 0; l < filters.size(); ++l) {
    const Vector w = filter_weights(resolve_filter(filters[l], d), d);
    const Vector s = (c2.transpose() * w) / n;
    out.col(static_cast<Eigen::Index>(l)) = s.unaryExpr([](double v) { return clamp_score(v); });
  }
  return out;
}

Matrix regularization_path(const SupportModel& model, PointMatrixRef points,
                           std::span<const double> lambdas) {
  if (lambdas.empty()) throw UsageError("regularization path needs a nonempty lambda grid");
  std::vector<FilterSpec> filters;
  filters.reserve(lambdas.size());
  for (double l : lambdas) filters.push_back(model.filter().with_lambda(l));
  return regularization_path(model, points, filters);
}

double kpca_lambda_from_rank(const SpectralDecomposition& d, std::size_t rank) {
  if (rank < 1) throw UsageError("kPCA rank must be >= 1");
  if (d.size() == 0) throw UsageError("empty spectrum");
  const double top = d.eigenvalues(0);
  const double positive = kRankTolerance * top;
  std::vector<double> distinct;
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    const double s = d.eigenvalues(j);
    if (!(s > positive)) break;
    if (distinct.empty() || distinct.back() - s > kDistinctTolerance * top) distinct.push_back(s);
  }
  if (distinct.size() < rank + 1) {
    throw UsageError("kPCA rank " + std::to_string(rank) + " needs at least " +
                     std::to_string(rank + 1) + " distinct positive eigenvalues, found " +
                     std::to_string(distinct.size()));
  }
  return 0.5 * (distinct[rank - 1] + distinct[rank]);
}

FilterSpec resolve_filter(const FilterSpec& f, const SpectralDecomposition& d) {
  if (f.resolved()) return f;
  return f.with_lambda(kpca_lambda_from_rank(d, *f.rank()));
}

}  // namespace kernsupp
