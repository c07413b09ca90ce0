#include "kernsupp/filters.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "kernsupp/error.hpp"
#include "kernsupp/format.hpp"

namespace kernsupp {

namespace {

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw UsageError("regularization parameter lambda must be positive, got " +
                     format_real(lambda));
  }
}

double clamp_spectrum(double sigma) {
  if (!(sigma >= -kSpectrumTolerance && sigma <= 1.0 + kSpectrumTolerance)) {
    throw UsageError("filter argument " + format_real(sigma) + " lies outside [0, 1]");
  }
  return std::clamp(sigma, 0.0, 1.0);
}

// 1 - (1 - s)^(m+1), accurate for small s.
double landweber_r(double sigma, int m) {
  return -std::expm1(static_cast<double>(m + 1) * std::log1p(-sigma));
}

}  // namespace

FilterSpec FilterSpec::tikhonov(double lambda) {
  require_lambda(lambda);
  FilterSpec f;
  f.kind_ = Kind::Tikhonov;
  f.lambda_ = lambda;
  return f;
}

FilterSpec FilterSpec::spectral_cutoff(double lambda) {
  require_lambda(lambda);
  FilterSpec f;
  f.kind_ = Kind::SpectralCutoff;
  f.lambda_ = lambda;
  return f;
}

FilterSpec FilterSpec::landweber(int iterations) {
  if (iterations < 0) {
    throw UsageError("Landweber iteration count must be >= 0, got " + std::to_string(iterations));
  }
  FilterSpec f;
  f.kind_ = Kind::Landweber;
  f.iterations_ = iterations;
  return f;
}

FilterSpec FilterSpec::kpca(double lambda) {
  require_lambda(lambda);
  FilterSpec f;
  f.kind_ = Kind::KpcaTruncation;
  f.lambda_ = lambda;
  return f;
}

FilterSpec FilterSpec::kpca_rank(std::size_t rank) {
  if (rank < 1) throw UsageError("kPCA rank must be >= 1");
  FilterSpec f;
  f.kind_ = Kind::KpcaTruncation;
  f.rank_ = rank;
  return f;
}

FilterSpec FilterSpec::parse(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t pos = 0;
  text = trim(text);
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    const auto start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) break;
    const auto token = text.substr(start, pos - start);
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("filter spec token '" + std::string(token) + "' is not key=value");
    }
    kv[std::string(token.substr(0, eq))] = std::string(token.substr(eq + 1));
  }
  const auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw UsageError(std::string("filter spec is missing '") + key + "'");
    return it->second;
  };
  const std::string& kind = get("filter");
  if (kind == "tikhonov") return tikhonov(parse_real(get("lambda"), "lambda"));
  if (kind == "cutoff" || kind == "spectral_cutoff") {
    return spectral_cutoff(parse_real(get("lambda"), "lambda"));
  }
  if (kind == "landweber") return landweber(static_cast<int>(parse_integer(get("m"), "m")));
  if (kind == "kpca") {
    if (kv.contains("lambda")) {
      FilterSpec f = kpca(parse_real(get("lambda"), "lambda"));
      if (kv.contains("rank")) f.rank_ = kpca_rank(static_cast<std::size_t>(parse_integer(get("rank"), "rank"))).rank_;
      return f;
    }
    return kpca_rank(static_cast<std::size_t>(parse_integer(get("rank"), "rank")));
  }
  throw UsageError("unknown filter kind '" + kind + "'");
}

double FilterSpec::lambda() const {
  if (kind_ == Kind::Landweber) throw UsageError("Landweber filter is parametrized by m");
  if (!resolved()) throw UsageError("kPCA filter given by rank has not been resolved");
  return lambda_;
}

int FilterSpec::iterations() const {
  if (kind_ != Kind::Landweber) throw UsageError("only Landweber has an iteration count");
  return iterations_;
}

bool FilterSpec::resolved() const { return kind_ != Kind::KpcaTruncation || lambda_ > 0.0; }

FilterSpec FilterSpec::with_lambda(double lambda) const {
  switch (kind_) {
    case Kind::Tikhonov: return tikhonov(lambda);
    case Kind::SpectralCutoff: return spectral_cutoff(lambda);
    case Kind::KpcaTruncation: {
      FilterSpec f = kpca(lambda);
      f.rank_ = rank_;
      return f;
    }
    case Kind::Landweber: break;
  }
  throw UsageError("Landweber filter is parametrized by m, not lambda");
}

std::string FilterSpec::name() const {
  switch (kind_) {
    case Kind::Tikhonov: return "tikhonov";
    case Kind::SpectralCutoff: return "cutoff";
    case Kind::Landweber: return "landweber";
    case Kind::KpcaTruncation: return "kpca";
  }
  return {};
}

std::string FilterSpec::to_string() const {
  std::string s = "filter=" + name();
  if (kind_ == Kind::Landweber) return s + " m=" + std::to_string(iterations_);
  if (rank_) s += " rank=" + std::to_string(*rank_);
  if (resolved()) s += " lambda=" + format_real(lambda_);
  return s;
}

double r_value(const FilterSpec& f, double sigma) {
  sigma = clamp_spectrum(sigma);
  switch (f.kind()) {
    case FilterSpec::Kind::Tikhonov: return sigma / (sigma + f.lambda());
    case FilterSpec::Kind::SpectralCutoff: {
      const double lambda = f.lambda();
      return sigma > lambda ? 1.0 : sigma / lambda;
    }
    case FilterSpec::Kind::Landweber: return landweber_r(sigma, f.iterations());
    case FilterSpec::Kind::KpcaTruncation: return sigma >= f.lambda() ? 1.0 : 0.0;
  }
  return 0.0;
}

double g_value(const FilterSpec& f, double sigma) {
  sigma = clamp_spectrum(sigma);
  switch (f.kind()) {
    case FilterSpec::Kind::Tikhonov: return 1.0 / (sigma + f.lambda());
    case FilterSpec::Kind::SpectralCutoff: {
      const double lambda = f.lambda();
      return sigma > lambda ? 1.0 / sigma : 1.0 / lambda;
    }
    case FilterSpec::Kind::Landweber: {
      // sum_{k=0}^{m} (1 - s)^k, which is m + 1 at s = 0.
      const int m = f.iterations();
      return sigma > 0.0 ? landweber_r(sigma, m) / sigma : static_cast<double>(m + 1);
    }
    case FilterSpec::Kind::KpcaTruncation: return sigma >= f.lambda() ? 1.0 / sigma : 0.0;
  }
  return 0.0;
}

std::optional<double> lipschitz_constant(const FilterSpec& f) {
  switch (f.kind()) {
    case FilterSpec::Kind::Tikhonov:
    case FilterSpec::Kind::SpectralCutoff: return 1.0 / f.lambda();
    case FilterSpec::Kind::Landweber: return static_cast<double>(f.iterations() + 1);
    case FilterSpec::Kind::KpcaTruncation: return std::nullopt;
  }
  return std::nullopt;
}

SpectralDecomposition decompose_symmetric(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DataError("decompose: expected a nonempty square matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");

  const auto n = a.rows();
  SpectralDecomposition d;
  d.eigenvalues.resize(n);
  d.eigenvectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    // Eigen returns ascending order.
    const double s = solver.eigenvalues()(n - 1 - j);
    if (!(s >= -kSpectrumTolerance && s <= 1.0 + kSpectrumTolerance)) {
      throw NumericError("eigenvalue " + format_real(s) +
                         " outside [0, 1]; the kernel must have unit diagonal");
    }
    const double c = std::clamp(s, 0.0, 1.0);
    d.clamped = std::max(d.clamped, std::abs(c - s));
    d.eigenvalues(j) = c;
    d.eigenvectors.col(j) = solver.eigenvectors().col(n - 1 - j);
  }
  return d;
}

SpectralDecomposition decompose(const GramMatrix& g) {
  return decompose_symmetric(g.matrix() / static_cast<double>(g.size()));
}

namespace {

template <typename Fn>
Matrix spectral_function(const SpectralDecomposition& d, Fn fn) {
  Vector values(d.size());
  for (Eigen::Index j = 0; j < d.size(); ++j) values(j) = fn(d.eigenvalues(j));
  Matrix out = d.eigenvectors * values.asDiagonal() * d.eigenvectors.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

Matrix apply_r(const FilterSpec& f, const SpectralDecomposition& d) {
  return spectral_function(d, [&](double s) { return r_value(f, s); });
}

Matrix apply_g(const FilterSpec& f, const SpectralDecomposition& d) {
  return spectral_function(d, [&](double s) { return g_value(f, s); });
}

}  // namespace kernsupp
