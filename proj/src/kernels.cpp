#include "kernsupp/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "kernsupp/error.hpp"
#include "kernsupp/format.hpp"

namespace kernsupp {

std::string to_string(Separation s) {
  switch (s) {
    case Separation::Complete: return "complete";
    case Separation::LinearManifolds: return "linear-manifolds";
    case Separation::None: return "none";
  }
  return "unknown";
}

namespace {

void require_bandwidth(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw UsageError("kernel bandwidth sigma must be positive and finite, got " +
                     format_real(sigma));
  }
}

// Recursive-descent parser for compact kernel expressions:
//   abel(0.5) | l1exp(1) | gaussian(2) | linear | normalized(<expr>)
//   product(<expr>[0:1]*<expr>[1:3])
class ExpressionParser {
public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  KernelSpec parse_all() {
    KernelSpec k = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return k;
  }

  std::vector<std::pair<KernelSpec, CoordinateSlice>> parse_factor_list() {
    std::vector<std::pair<KernelSpec, CoordinateSlice>> factors;
    factors.push_back(parse_factor());
    skip_space();
    while (peek() == '*') {
      ++pos_;
      factors.push_back(parse_factor());
      skip_space();
    }
    if (pos_ != text_.size()) fail("trailing characters");
    return factors;
  }

private:
  KernelSpec parse_expr() {
    skip_space();
    const std::string name = parse_name();
    if (name == "linear") return KernelSpec::linear();
    expect('(');
    KernelSpec out = KernelSpec::linear();
    if (name == "abel") {
      out = KernelSpec::abel(parse_number());
    } else if (name == "l1exp" || name == "l1_exponential") {
      out = KernelSpec::l1_exponential(parse_number());
    } else if (name == "gaussian") {
      out = KernelSpec::gaussian(parse_number());
    } else if (name == "normalized") {
      out = normalize(parse_expr());
    } else if (name == "product") {
      std::vector<std::pair<KernelSpec, CoordinateSlice>> factors;
      factors.push_back(parse_factor());
      skip_space();
      while (peek() == '*') {
        ++pos_;
        factors.push_back(parse_factor());
        skip_space();
      }
      out = product_kernel(std::move(factors));
    } else {
      fail("unknown kernel '" + name + "'");
    }
    expect(')');
    return out;
  }

  std::pair<KernelSpec, CoordinateSlice> parse_factor() {
    KernelSpec k = parse_expr();
    expect('[');
    const auto begin = parse_index();
    expect(':');
    const auto end = parse_index();
    expect(']');
    return {std::move(k), CoordinateSlice{begin, end}};
  }

  std::string parse_name() {
    const auto start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a kernel name");
    return std::string(text_.substr(start, pos_ - start));
  }

  double parse_number() {
    skip_space();
    const auto start = pos_;
    while (pos_ < text_.size() && std::string_view("0123456789+-.eE").find(text_[pos_]) !=
                                      std::string_view::npos) {
      ++pos_;
    }
    return parse_real(text_.substr(start, pos_ - start), "kernel bandwidth");
  }

  std::size_t parse_index() {
    skip_space();
    const auto start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return static_cast<std::size_t>(
        parse_integer(text_.substr(start, pos_ - start), "coordinate slice"));
  }

  void expect(char c) {
    skip_space();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw UsageError("kernel spec '" + std::string(text_) + "': " + msg + " at offset " +
                     std::to_string(pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

KernelSpec KernelSpec::abel(double sigma) {
  require_bandwidth(sigma);
  KernelSpec k;
  k.kind_ = Kind::Abel;
  k.sigma_ = sigma;
  k.unit_diagonal_ = true;
  return k;
}

KernelSpec KernelSpec::l1_exponential(double sigma) {
  require_bandwidth(sigma);
  KernelSpec k;
  k.kind_ = Kind::L1Exponential;
  k.sigma_ = sigma;
  k.unit_diagonal_ = true;
  return k;
}

KernelSpec KernelSpec::gaussian(double sigma) {
  require_bandwidth(sigma);
  KernelSpec k;
  k.kind_ = Kind::Gaussian;
  k.sigma_ = sigma;
  k.unit_diagonal_ = true;
  return k;
}

KernelSpec KernelSpec::linear() {
  KernelSpec k;
  k.kind_ = Kind::Linear;
  k.unit_diagonal_ = false;
  return k;
}

KernelSpec KernelSpec::parse(std::string_view text) {
  text = trim(text);
  if (text.find("kernel=") == std::string_view::npos) {
    return ExpressionParser(text).parse_all();
  }
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    const auto start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) break;
    const auto token = text.substr(start, pos - start);
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("kernel spec token '" + std::string(token) + "' is not key=value");
    }
    kv[std::string(token.substr(0, eq))] = std::string(token.substr(eq + 1));
  }
  const auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      throw UsageError(std::string("kernel spec is missing '") + key + "'");
    }
    return it->second;
  };
  const std::string& kind = get("kernel");
  if (kind == "abel") return abel(parse_real(get("sigma"), "sigma"));
  if (kind == "l1exp" || kind == "l1_exponential") {
    return l1_exponential(parse_real(get("sigma"), "sigma"));
  }
  if (kind == "gaussian") return gaussian(parse_real(get("sigma"), "sigma"));
  if (kind == "linear") return linear();
  if (kind == "normalized") return normalize(ExpressionParser(get("inner")).parse_all());
  if (kind == "product") return product_kernel(ExpressionParser(get("factors")).parse_factor_list());
  throw UsageError("unknown kernel kind '" + kind + "'");
}

bool KernelSpec::has_bandwidth() const {
  return kind_ == Kind::Abel || kind_ == Kind::L1Exponential || kind_ == Kind::Gaussian;
}

double KernelSpec::sigma() const {
  if (!has_bandwidth()) throw UsageError("kernel '" + expression() + "' has no bandwidth");
  return sigma_;
}

KernelSpec KernelSpec::with_sigma(double sigma) const {
  switch (kind_) {
    case Kind::Abel: return abel(sigma);
    case Kind::L1Exponential: return l1_exponential(sigma);
    case Kind::Gaussian: return gaussian(sigma);
    default: throw UsageError("kernel '" + expression() + "' has no bandwidth");
  }
}

Separation KernelSpec::separation() const {
  switch (kind_) {
    case Kind::Abel:
    case Kind::L1Exponential: return Separation::Complete;
    case Kind::Gaussian: return Separation::None;
    case Kind::Linear: return Separation::LinearManifolds;
    case Kind::Normalized: return inner_->separation();
    case Kind::Product: {
      // Complete iff every factor is; otherwise the weakest factor wins.
      auto worst = Separation::Complete;
      for (const auto& f : factors_) worst = std::max(worst, f.kernel->separation());
      return worst;
    }
  }
  return Separation::None;
}

std::optional<std::size_t> KernelSpec::dimension() const {
  if (kind_ == Kind::Product) return factors_.back().slice.end;
  if (kind_ == Kind::Normalized) return inner_->dimension();
  return std::nullopt;
}

const KernelSpec& KernelSpec::inner() const {
  if (kind_ != Kind::Normalized) throw UsageError("kernel is not a normalized kernel");
  return *inner_;
}

double KernelSpec::operator()(PointRef x, PointRef y) const {
  switch (kind_) {
    case Kind::Abel: return std::exp(-(x - y).norm() / sigma_);
    case Kind::L1Exponential: return std::exp(-(x - y).cwiseAbs().sum() / sigma_);
    case Kind::Gaussian: return std::exp(-(x - y).squaredNorm() / (sigma_ * sigma_));
    case Kind::Linear: return x.dot(y);
    case Kind::Product: {
      double value = 1.0;
      for (const auto& f : factors_) {
        const auto b = static_cast<Eigen::Index>(f.slice.begin);
        const auto len = static_cast<Eigen::Index>(f.slice.size());
        value *= (*f.kernel)(x.segment(b, len), y.segment(b, len));
      }
      return value;
    }
    case Kind::Normalized: {
      const double kxx = (*inner_)(x, x);
      const double kyy = (*inner_)(y, y);
      if (!(kxx > 0.0) || !(kyy > 0.0)) {
        throw NumericError("normalized kernel needs K(x,x) > 0");
      }
      const double v = (*inner_)(x, y) / std::sqrt(kxx * kyy);
      return std::clamp(v, -1.0, 1.0);
    }
  }
  return 0.0;
}

std::string KernelSpec::to_string() const {
  switch (kind_) {
    case Kind::Abel: return "kernel=abel sigma=" + format_real(sigma_);
    case Kind::L1Exponential: return "kernel=l1exp sigma=" + format_real(sigma_);
    case Kind::Gaussian: return "kernel=gaussian sigma=" + format_real(sigma_);
    case Kind::Linear: return "kernel=linear";
    case Kind::Normalized: return "kernel=normalized inner=" + inner_->expression();
    case Kind::Product: {
      std::string s = "kernel=product factors=";
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) s += '*';
        s += factors_[i].kernel->expression() + "[" + std::to_string(factors_[i].slice.begin) +
             ":" + std::to_string(factors_[i].slice.end) + "]";
      }
      return s;
    }
  }
  return {};
}

std::string KernelSpec::expression() const {
  switch (kind_) {
    case Kind::Abel: return "abel(" + format_real(sigma_) + ")";
    case Kind::L1Exponential: return "l1exp(" + format_real(sigma_) + ")";
    case Kind::Gaussian: return "gaussian(" + format_real(sigma_) + ")";
    case Kind::Linear: return "linear";
    case Kind::Normalized: return "normalized(" + inner_->expression() + ")";
    case Kind::Product: {
      std::string s = "product(";
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) s += '*';
        s += factors_[i].kernel->expression() + "[" + std::to_string(factors_[i].slice.begin) +
             ":" + std::to_string(factors_[i].slice.end) + "]";
      }
      return s + ")";
    }
  }
  return {};
}

bool KernelSpec::operator==(const KernelSpec& other) const {
  if (kind_ != other.kind_ || sigma_ != other.sigma_) return false;
  if (kind_ == Kind::Normalized) return *inner_ == *other.inner_;
  if (kind_ == Kind::Product) {
    if (factors_.size() != other.factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (!(factors_[i].slice == other.factors_[i].slice) ||
          !(*factors_[i].kernel == *other.factors_[i].kernel)) {
        return false;
      }
    }
  }
  return true;
}

double kernel_eval(const KernelSpec& k, PointRef x, PointRef y) {
  if (x.size() != y.size()) {
    throw DataError("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()) + ")");
  }
  if (const auto d = k.dimension(); d && static_cast<std::size_t>(x.size()) != *d) {
    throw DataError("kernel_eval: kernel expects dimension " + std::to_string(*d) + ", got " +
                    std::to_string(x.size()));
  }
  if (x.size() == 0) throw DataError("kernel_eval: empty point");
  if (!x.allFinite() || !y.allFinite()) throw DataError("kernel_eval: non-finite coordinate");
  return k(x, y);
}

double induced_metric(const KernelSpec& k, PointRef x, PointRef y) {
  const double kxy = kernel_eval(k, x, y);
  const double kxx = k(x, x);
  const double kyy = k(y, y);
  const double radicand = kxx + kyy - 2.0 * kxy;
  const double slack = kPsdTolerance * std::max(1.0, std::abs(kxx) + std::abs(kyy));
  if (radicand < -slack) {
    throw NumericError("induced_metric: negative radicand " + format_real(radicand) +
                       " (kernel is not positive definite here)");
  }
  return std::sqrt(std::max(0.0, radicand));
}

KernelSpec normalize(const KernelSpec& k) {
  if (k.unit_diagonal()) return k;
  KernelSpec out;
  out.kind_ = KernelSpec::Kind::Normalized;
  out.unit_diagonal_ = true;
  out.inner_ = std::make_shared<const KernelSpec>(k);
  return out;
}

KernelSpec product_kernel(std::vector<std::pair<KernelSpec, CoordinateSlice>> factors) {
  if (factors.empty()) throw UsageError("product kernel needs at least one factor");
  std::sort(factors.begin(), factors.end(),
            [](const auto& a, const auto& b) { return a.second.begin < b.second.begin; });
  std::size_t next = 0;
  for (const auto& [k, slice] : factors) {
    if (slice.end <= slice.begin) throw UsageError("product kernel: empty coordinate slice");
    if (slice.begin < next) throw UsageError("product kernel: overlapping coordinate slices");
    if (slice.begin > next) throw UsageError("product kernel: coordinate slices leave a gap");
    if (const auto d = k.dimension(); d && *d != slice.size()) {
      throw UsageError("product kernel: factor dimension does not match its slice");
    }
    next = slice.end;
  }
  KernelSpec out;
  out.kind_ = KernelSpec::Kind::Product;
  out.unit_diagonal_ = std::all_of(factors.begin(), factors.end(),
                                   [](const auto& f) { return f.first.unit_diagonal(); });
  for (auto& [k, slice] : factors) {
    out.factors_.push_back({std::make_shared<const KernelSpec>(std::move(k)), slice});
  }
  return out;
}

GramMatrix::GramMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw DataError("Gram matrix must be square");
}

void validate_points(const KernelSpec& k, PointMatrixRef points) {
  if (points.cols() == 0) throw DataError("points have dimension 0");
  if (const auto d = k.dimension(); d && static_cast<std::size_t>(points.cols()) != *d) {
    throw DataError("kernel expects dimension " + std::to_string(*d) + ", points have " +
                    std::to_string(points.cols()));
  }
  if (!points.allFinite()) throw DataError("points contain non-finite coordinates");
}

GramMatrix gram(const KernelSpec& k, PointMatrixRef points, std::size_t max_points) {
  const auto n = points.rows();
  if (n == 0) throw DataError("gram: empty point set");
  if (static_cast<std::size_t>(n) > max_points) {
    throw DataError("gram: " + std::to_string(n) + " points exceed the configured cap of " +
                    std::to_string(max_points));
  }
  validate_points(k, points);
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const PointRef xi = points.row(i).transpose();
    g(i, i) = k.unit_diagonal() ? 1.0 : k(xi, xi);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = k(xi, points.row(j).transpose());
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return GramMatrix(std::move(g));
}

Matrix cross_gram(const KernelSpec& k, PointMatrixRef train, PointMatrixRef test) {
  if (train.cols() != test.cols()) {
    throw DataError("dimension mismatch: model has d=" + std::to_string(train.cols()) +
                    ", test points have d=" + std::to_string(test.cols()));
  }
  validate_points(k, test);
  Matrix out(train.rows(), test.rows());
  for (Eigen::Index j = 0; j < test.rows(); ++j) {
    const PointRef y = test.row(j).transpose();
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
      out(i, j) = k(train.row(i).transpose(), y);
    }
  }
  return out;
}

Vector kernel_column(const KernelSpec& k, PointMatrixRef train, PointRef x) {
  if (x.size() != train.cols()) {
    throw DataError("dimension mismatch: model has d=" + std::to_string(train.cols()) +
                    ", point has d=" + std::to_string(x.size()));
  }
  if (!x.allFinite()) throw DataError("point has non-finite coordinates");
  Vector out(train.rows());
  for (Eigen::Index i = 0; i < train.rows(); ++i) out(i) = k(train.row(i).transpose(), x);
  return out;
}

double min_eigenvalue(const GramMatrix& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(g.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
  return solver.eigenvalues().minCoeff();
}

bool is_psd(const GramMatrix& g, double eps) {
  const double norm1 = g.matrix().cwiseAbs().colwise().sum().maxCoeff();
  return min_eigenvalue(g) >= -static_cast<double>(g.size()) * eps * norm1;
}

}  // namespace kernsupp
