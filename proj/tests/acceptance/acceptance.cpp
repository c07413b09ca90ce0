// Acceptance suite: prints one PASS/FAIL line per criterion.
//
//   acceptance [--only N[,N...]] [--expect-fail N[,N...]]
//
// The exit status is 0 when every criterion passes, except those named by
// --expect-fail, which are still run and reported.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kernsupp/error.hpp"
#include "kernsupp/estimator.hpp"
#include "kernsupp/eval.hpp"
#include "kernsupp/format.hpp"
#include "kernsupp/harness.hpp"
#include "kernsupp/io.hpp"
#include "kernsupp/oracles.hpp"
#include "kernsupp/selection.hpp"
#include "kernsupp/synth.hpp"

using namespace kernsupp;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v, int digits = 6) { return format_real(v, digits); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

PointMatrix uniform_points(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointMatrix p(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) p(i, j) = u(rng);
  return p;
}

Matrix unit_spectrum_matrix(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = g(rng);
  const Matrix q = Eigen::HouseholderQR<Matrix>(a).householderQ();
  Vector s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = u(rng);
  const Matrix m = q * s.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

double auc_of(const Vector& pos, const Vector& neg) {
  return roc_auc(std::span<const double>(pos.data(), static_cast<std::size_t>(pos.size())),
                 std::span<const double>(neg.data(), static_cast<std::size_t>(neg.size())))
      .auc;
}

// 1. ---------------------------------------------------------------------

Outcome filter_properties() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> log_lambda(-8.0, 0.0);
  std::uniform_int_distribution<int> iterations(0, 500);
  std::size_t checks = 0;
  std::size_t violations = 0;
  const auto check = [&](bool ok) {
    ++checks;
    violations += !ok;
  };
  for (int family = 0; family < 3; ++family) {
    for (int draw = 0; draw < 10000; ++draw) {
      const double lambda = std::pow(10.0, log_lambda(rng));
      const FilterSpec f = family == 0   ? FilterSpec::tikhonov(lambda)
                           : family == 1 ? FilterSpec::spectral_cutoff(lambda)
                                         : FilterSpec::landweber(iterations(rng));
      const double s = unit(rng);
      const double t = unit(rng);
      const double r = r_value(f, s);
      check(r >= 0.0 && r <= 1.0);
      check(r_value(f, 0.0) == 0.0);
      const double sg = s * g_value(f, s);
      check(std::abs(r - sg) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(r, sg));
      const double l = *lipschitz_constant(f);
      check(std::abs(r - r_value(f, t)) <= l * std::abs(s - t) * (1.0 + 1e-12) + 1e-15);
    }
  }
  const double elapsed = seconds_since(start);
  return {violations == 0 && elapsed < 5.0,
          std::to_string(violations) + " violations in " + std::to_string(checks) +
              " checks over 3 x 10^4 draws, " + num(elapsed, 3) + " s (limit 5 s)"};
}

// 2. ---------------------------------------------------------------------

Outcome maurer() {
  const auto start = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> log_lambda(-3.0, 0.0);
  std::uniform_int_distribution<int> iterations(0, 100);
  std::size_t violations = 0;
  double worst = 0.0;
  for (int family = 0; family < 3; ++family) {
    for (int pair = 0; pair < 200; ++pair) {
      const double lambda = std::pow(10.0, log_lambda(rng));
      const FilterSpec f = family == 0   ? FilterSpec::tikhonov(lambda)
                           : family == 1 ? FilterSpec::spectral_cutoff(lambda)
                                         : FilterSpec::landweber(iterations(rng));
      const auto r = maurer_check(unit_spectrum_matrix(rng, 8), unit_spectrum_matrix(rng, 8), f);
      violations += !r.holds(1e-10);
      worst = std::max(worst, r.lhs / r.rhs);
    }
  }
  const double elapsed = seconds_since(start);
  return {violations == 0 && elapsed < 10.0,
          std::to_string(violations) + " violations in 600 pairs, max lhs/rhs " + num(worst) + ", " +
              num(elapsed, 3) + " s (limit 10 s)"};
}

// 3. ---------------------------------------------------------------------

Outcome algorithm_equivalence() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<Eigen::Index> size(2, 200);
  std::uniform_int_distribution<Eigen::Index> dim(1, 5);
  std::uniform_real_distribution<double> log_lambda(-6.0, 0.0);
  std::uniform_real_distribution<double> log_sigma(-1.0, 0.5);
  std::uniform_int_distribution<int> iterations(0, 100);
  double tik = 0.0;
  double lw = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    const Eigen::Index n = size(rng);
    const Eigen::Index d = dim(rng);
    const PointMatrix train = uniform_points(rng, n, d);
    PointMatrix test = uniform_points(rng, 100, d);
    test.topRows(std::min<Eigen::Index>(n, 20)) = train.topRows(std::min<Eigen::Index>(n, 20));
    const KernelSpec k = KernelSpec::abel(std::pow(10.0, log_sigma(rng)));

    const auto t = fit(train, k, FilterSpec::tikhonov(std::pow(10.0, log_lambda(rng))));
    tik = std::max(tik, (score_batch(t, test, Algorithm::Spectral) -
                         score_batch(t, test, Algorithm::Cholesky)).cwiseAbs().maxCoeff());

    const auto l = t.with_filter(FilterSpec::landweber(iterations(rng)));
    lw = std::max(lw, (score_batch(l, test, Algorithm::Spectral) -
                       score_batch(l, test, Algorithm::Landweber)).cwiseAbs().maxCoeff());
  }
  return {tik <= 1e-8 && lw <= 1e-10,
          "50 instances: max |spectral - cholesky| " + num(tik, 3) +
              " (limit 1e-8), max |polynomial - iterative| " + num(lw, 3) + " (limit 1e-10)"};
}

// 4. ---------------------------------------------------------------------

Outcome interpolation() {
  std::mt19937_64 rng(404);
  const PointMatrix train = uniform_points(rng, 60, 2);
  const KernelSpec k = KernelSpec::abel(0.5);
  const auto model = fit(train, k, FilterSpec::spectral_cutoff(1e-10), Algorithm::Spectral);
  const double smallest = model.decomposition().eigenvalues.minCoeff();
  const bool nonsingular = smallest > 1e-10;

  const Vector on = score_batch(model, train);
  const bool interpolates = on.minCoeff() >= 1.0 - 1e-6 && on.maxCoeff() <= 1.0;

  const ProjectionOracle oracle(model.gram());
  const PointMatrix off = uniform_points(rng, 50, 2);
  const Vector scores = score_batch(model, off);
  double gap = 0.0;
  for (Eigen::Index j = 0; j < off.rows(); ++j) {
    gap = std::max(gap, std::abs(scores(j) - oracle.score(kernel_column(k, train, off.row(j).transpose()))));
  }
  return {nonsingular && interpolates && gap <= 1e-6,
          "n=60, smallest eigenvalue of K/n " + num(smallest, 3) + ", training scores in [" +
              num(on.minCoeff(), 12) + ", " + num(on.maxCoeff(), 12) +
              "], max |F_n - projection oracle| on 50 off-sample points " + num(gap, 3) + " (limit 1e-6)"};
}

// 5. ---------------------------------------------------------------------

Outcome concentration() {
  const auto start = Clock::now();
  ConcentrationConfig c;
  c.n = 100;
  c.delta = 2.0;
  c.trials = 500;
  c.reference_n = 20000;
  c.seed = 505;
  const auto r = concentration_harness(SyntheticTask::make("circle"), KernelSpec::abel(1.0), c);
  const double elapsed = seconds_since(start);
  std::vector<double> observed;
  for (const auto& row : r.rows) observed.push_back(row.observed);
  return {r.passed() && elapsed < 120.0,
          "violation fraction " + num(r.violation_fraction) + " (allowed " + num(r.allowed_fraction) +
              "), bound " + num(r.rows.front().bound) + ", median |T_n - T_ref|_HS " + num(median(observed)) +
              ", " + num(elapsed, 3) + " s (limit 120 s)"};
}

// 6. ---------------------------------------------------------------------

Outcome hausdorff_consistency() {
  const auto task = SyntheticTask::make("circle");
  const auto grid = reference_grid(task, 61);
  const PointMatrix support = task.reference_support(1000);
  const std::size_t sizes[] = {50, 100, 200, 400};
  std::vector<double> medians;
  std::string detail;
  for (std::size_t n : sizes) {
    const double lambda = rate_lambda(static_cast<double>(n), 1.0, 1.0);
    const double tau = 0.5 * std::sqrt(lambda);
    std::vector<double> distances;
    double best_score = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const PointMatrix x = task.sample(n, stream_seed(606, seed));
      const KernelSpec k = KernelSpec::abel(width_heuristic(x, 10));
      const auto model = fit(x, k, FilterSpec::tikhonov(lambda), Algorithm::Auto, tau);
      const Vector s = score_batch(model, grid.points);
      best_score = std::max(best_score, s.maxCoeff());
      std::vector<Eigen::Index> inside;
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (is_member(s(i), tau)) inside.push_back(i);
      }
      if (inside.empty()) {
        distances.push_back(std::numeric_limits<double>::infinity());
        continue;
      }
      PointMatrix estimate(static_cast<Eigen::Index>(inside.size()), 2);
      for (std::size_t i = 0; i < inside.size(); ++i) estimate.row(static_cast<Eigen::Index>(i)) = grid.points.row(inside[i]);
      distances.push_back(hausdorff(estimate, support));
    }
    medians.push_back(median(distances));
    detail += (detail.empty() ? "" : "; ") + std::string("n=") + std::to_string(n) + " median d_H " +
              num(medians.back(), 4) + " (threshold " + num(1.0 - tau, 4) + ", max F_n " + num(best_score, 4) + ")";
  }
  bool monotone = true;
  for (std::size_t i = 1; i < medians.size(); ++i) monotone = monotone && medians[i] <= medians[i - 1];
  const bool halved = std::isfinite(medians.back()) && medians.back() <= 0.5 * medians.front();
  if (!std::isfinite(medians.front())) {
    detail += "; estimate empty: F_n <= r(s_1) = s_1/(s_1+lambda) < 1-tau for this schedule";
  }
  return {monotone && halved, detail};
}

// 7. ---------------------------------------------------------------------

struct MnistSet {
  PointMatrix images;
  std::vector<int> labels;
};

// CSV with the label in column 0 followed by 784 pixel values in 0..255.
MnistSet read_mnist_csv(const std::string& path) {
  CsvOptions options;
  options.label_column = 0;
  const Dataset ds = load_csv(path, options);
  MnistSet out;
  out.images = ds.rows / 255.0;
  for (double l : *ds.labels) out.labels.push_back(static_cast<int>(l));
  return out;
}

PointMatrix select_digit(const MnistSet& set, int digit, std::size_t limit) {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < set.labels.size() && rows.size() < limit; ++i) {
    if (set.labels[i] == digit) rows.push_back(static_cast<Eigen::Index>(i));
  }
  PointMatrix out(static_cast<Eigen::Index>(rows.size()), set.images.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = set.images.row(rows[i]);
  return out;
}

std::string mnist_part(bool& passed) {
  const char* dir = std::getenv("KERNSUPP_MNIST_DIR");
  if (!dir) return "MNIST part skipped (set KERNSUPP_MNIST_DIR to a directory with mnist_train.csv and mnist_test.csv)";
  const MnistSet train = read_mnist_csv(std::string(dir) + "/mnist_train.csv");
  const MnistSet test = read_mnist_csv(std::string(dir) + "/mnist_test.csv");
  const PointMatrix x = select_digit(train, 3, 500);
  const PointMatrix pos = select_digit(test, 3, 1000);
  const PointMatrix neg = select_digit(test, 8, 1000);
  const KernelSpec k = KernelSpec::abel(width_heuristic(x, 10));
  const auto base = fit(x, k, FilterSpec::tikhonov(1.0), Algorithm::Spectral);
  const auto model = base.with_filter(FilterSpec::tikhonov(lambda_curvature(base.decomposition().eigenvalues)));
  const double auc = auc_of(score_batch(model, pos), score_batch(model, neg));
  const bool ok = std::abs(auc - 0.837) <= 0.05;
  passed = passed && ok;
  return "MNIST 3 vs 8 AUC " + num(auc, 4) + " (target 0.837 +/- 0.05)";
}

Outcome auc_sanity() {
  const auto upper = SyntheticTask::make("moon_upper");
  const auto lower = SyntheticTask::make("moon_lower");
  std::vector<double> spectral;
  std::vector<double> parzen;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PointMatrix x = upper.sample(300, stream_seed(707, 3 * seed));
    const PointMatrix pos = upper.sample(200, stream_seed(707, 3 * seed + 1));
    const PointMatrix neg = lower.sample(200, stream_seed(707, 3 * seed + 2));
    const double sigma = width_heuristic(x, 10);
    const auto base = fit(x, KernelSpec::abel(sigma), FilterSpec::tikhonov(1.0), Algorithm::Spectral);
    const auto model =
        base.with_filter(FilterSpec::tikhonov(lambda_curvature(base.decomposition().eigenvalues)));
    spectral.push_back(auc_of(score_batch(model, pos), score_batch(model, neg)));
    parzen.push_back(auc_of(parzen_scores(x, sigma, pos), parzen_scores(x, sigma, neg)));
  }
  const double s = median(spectral);
  const double p = median(parzen);
  bool passed = s >= 0.95 && s >= p;
  std::string detail = "two moons n=300: median spectral AUC " + num(s, 4) + ", median Parzen AUC " +
                       num(p, 4) + " (need >= 0.95 and >= Parzen); ";
  detail += mnist_part(passed);
  return {passed, detail};
}

// 8. ---------------------------------------------------------------------

// Relative agreement to 12 significant digits against an 80-bit re-evaluation.
bool agrees(double value, long double reference) {
  const long double diff = std::fabs(static_cast<long double>(value) - reference);
  return diff <= 5e-13L * std::fabs(reference) || diff <= 1e-300L;
}

Outcome bound_calculators() {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto log_uniform = [&](double lo, double hi) { return std::pow(10.0, lo + (hi - lo) * unit(rng)); };
  std::size_t mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    const double n = std::floor(log_uniform(0.0, 6.0));
    const double delta = log_uniform(-2.0, 1.5);
    const double lambda = log_uniform(-8.0, 0.0);
    const double s = std::max(1e-3, unit(rng));
    const double b = unit(rng);
    const double c_s = log_uniform(-2.0, 2.0);
    const double d_b = 1.0 + log_uniform(-2.0, 2.0);
    const double m = log_uniform(-2.0, 2.0);
    const double variance = log_uniform(-3.0, 1.0);
    Vector spectrum(12);
    for (Eigen::Index j = 0; j < spectrum.size(); ++j) spectrum(j) = std::pow(unit(rng), 3.0);

    const long double N = n, D = delta, L = lambda, S = s, B = b, C = c_s, DB = d_b, M = m, V = variance;

    long double eff = 0.0L;
    for (Eigen::Index j = 0; j < spectrum.size(); ++j) {
      const long double sj = spectrum(j);
      if (sj > 0) eff += sj / (sj + L);
    }
    mismatches += !agrees(effective_dimension(spectrum, lambda), eff);

    const double eff_d = effective_dimension(spectrum, lambda);
    const long double sample = D / (N * L) + std::sqrt(2.0L * D * static_cast<long double>(eff_d) / (N * L));
    mismatches += !agrees(sample_error_bound(n, lambda, delta, eff_d), sample);

    mismatches += !agrees(approximation_error_bound(lambda, s, c_s), std::pow(L, S) * C);

    const long double constant = std::max(C, 2.0L * DB * std::max(D, std::sqrt(2.0L * D)));
    mismatches += !agrees(finite_sample_bound(n, delta, s, b, c_s, d_b),
                          constant * std::pow(N, -S / (2.0L * S + B + 1.0L)));

    mismatches += !agrees(bernstein_bound(m, variance, n, delta), M * D / N + std::sqrt(2.0L * V * D / N));
  }
  return {mismatches == 0, std::to_string(mismatches) +
                               " mismatches beyond 12 significant digits in 5 x 100 evaluations"};
}

// 9. ---------------------------------------------------------------------

std::string pipeline_output(std::uint64_t seed) {
  const auto task = SyntheticTask::make("two_circles");
  const PointMatrix x = task.sample(150, seed);
  const PointMatrix probe = task.sample(40, seed + 1);
  const KernelSpec k = KernelSpec::abel(width_heuristic(x, 10));
  const auto model = fit(x, k, FilterSpec::tikhonov(1e-3));
  const Vector s = score_batch(model, probe);
  std::ostringstream out;
  CsvWriter w(out);
  w.timestamp(false);
  w.meta("kernel", k.expression());
  w.header({"index", "score"});
  for (Eigen::Index i = 0; i < s.size(); ++i) w.row({std::to_string(i), CsvWriter::number(s(i))});
  BernsteinConfig bc;
  bc.trials = 50;
  bc.seed = seed;
  for (const auto& row : bernstein_coin_harness(bc).rows) w.row({CsvWriter::number(row.observed)});
  return out.str();
}

Outcome determinism() {
  const bool identical = pipeline_output(909) == pipeline_output(909);
  const bool seeds_matter = pipeline_output(909) != pipeline_output(910);

  std::mt19937_64 rng(909);
  const PointMatrix x = uniform_points(rng, 120, 3);
  const PointMatrix q = uniform_points(rng, 80, 3);
  double drift = 0.0;
  const FilterSpec filters[] = {FilterSpec::tikhonov(1e-4), FilterSpec::spectral_cutoff(1e-3),
                                FilterSpec::landweber(40), FilterSpec::kpca_rank(5)};
  for (const auto& f : filters) {
    const auto model = fit(x, KernelSpec::l1_exponential(0.7), f, Algorithm::Auto, 0.05);
    const Vector expected = score_batch(model, q);
    for (auto format : {ModelFormat::Text, ModelFormat::Binary}) {
      for (bool with_dec : {true, false}) {
        std::stringstream buf;
        save_model(model, buf, {format, with_dec});
        drift = std::max(drift, (score_batch(load_model(buf), q) - expected).cwiseAbs().maxCoeff());
      }
    }
  }
  return {identical && seeds_matter && drift <= 1e-12,
          std::string("repeated runs ") + (identical ? "byte-identical" : "DIFFER") +
              ", different seeds " + (seeds_matter ? "differ" : "AGREE") +
              ", max round-trip drift " + num(drift, 3) + " over 16 save/load variants (limit 1e-12)"};
}

std::set<int> parse_list(const std::string& text) {
  std::set<int> out;
  for (const auto& field : split(text, ',')) {
    if (!field.empty()) out.insert(static_cast<int>(parse_integer(field, "criterion")));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  std::set<int> expected_failures;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if ((arg == "--only" || arg == "--expect-fail") && i + 1 < argc) {
      (arg == "--only" ? only : expected_failures) = parse_list(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N,...] [--expect-fail N,...]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"filter-family property suite", filter_properties},
      {"Maurer inequality", maurer},
      {"algorithm equivalence", algorithm_equivalence},
      {"interpolation oracle", interpolation},
      {"concentration check", concentration},
      {"Hausdorff consistency", hausdorff_consistency},
      {"AUC sanity", auc_sanity},
      {"bound calculators", bound_calculators},
      {"determinism and persistence", determinism},
  };

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.contains(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %d %s: %s\n", o.passed ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (o.passed == expected_failures.contains(id)) ++unexpected;
  }
  if (!expected_failures.empty()) {
    std::printf("known failures (documented): ");
    for (int id : expected_failures) std::printf("%d ", id);
    std::printf("\n");
  }
  return unexpected == 0 ? 0 : 1;
}
