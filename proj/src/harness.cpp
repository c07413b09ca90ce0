#include "kernsupp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kernsupp/error.hpp"
#include "kernsupp/estimator.hpp"
#include "kernsupp/format.hpp"
#include "kernsupp/oracles.hpp"

namespace kernsupp {

namespace {

void require_trials(std::size_t trials) {
  if (trials == 0) throw UsageError("a Monte-Carlo harness needs at least one trial");
}

void finish(HarnessResult& r, double delta) {
  std::size_t violations = 0;
  for (const auto& row : r.rows) violations += row.violated;
  r.violation_fraction = static_cast<double>(violations) / static_cast<double>(r.rows.size());
  r.allowed_fraction = 2.0 * std::exp(-delta);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

HarnessResult concentration_harness(const SyntheticTask& task, const KernelSpec& kernel,
                                    const ConcentrationConfig& config) {
  require_trials(config.trials);
  if (config.n < 1 || config.reference_n < 1) throw UsageError("sample sizes must be >= 1");
  const EmpiricalOperator reference(task.sample(config.reference_n, stream_seed(config.seed, 0)),
                                    kernel);
  const double bound = concentration_bound(static_cast<double>(config.n), config.delta);

  HarnessResult r;
  r.name = "concentration";
  r.note = "population operator approximated by a " + std::to_string(config.reference_n) +
           "-point reference sample of task " + task.name() + " with kernel " + kernel.expression();
  r.rows.reserve(config.trials);
  for (std::size_t t = 0; t < config.trials; ++t) {
    const EmpiricalOperator trial(task.sample(config.n, stream_seed(config.seed, t + 1)), kernel);
    const double observed = hs_distance(trial, reference);
    r.rows.push_back({t, config.n, config.delta, observed, bound, observed > bound});
  }
  finish(r, config.delta);
  return r;
}

HarnessResult bernstein_coin_harness(const BernsteinConfig& config) {
  require_trials(config.trials);
  if (config.n < 1) throw UsageError("sample size must be >= 1");
  const double n = static_cast<double>(config.n);
  const double bound = bernstein_bound(1.0, 1.0, n, config.delta);

  HarnessResult r;
  r.name = "bernstein";
  r.note = "i.i.d. +/-1 coin flips, M = 1, sigma^2 = 1, mean 0";
  r.rows.reserve(config.trials);
  for (std::size_t t = 0; t < config.trials; ++t) {
    std::mt19937_64 rng(stream_seed(config.seed, t));
    std::bernoulli_distribution coin(0.5);
    double sum = 0.0;
    for (std::size_t i = 0; i < config.n; ++i) sum += coin(rng) ? 1.0 : -1.0;
    const double observed = std::abs(sum / n);
    r.rows.push_back({t, config.n, config.delta, observed, bound, observed > bound});
  }
  finish(r, config.delta);
  return r;
}

HarnessResult sample_error_harness(const SyntheticTask& task, const KernelSpec& kernel,
                                   const SampleErrorConfig& config) {
  require_trials(config.trials);
  if (config.n < 1 || config.reference_n < 1) throw UsageError("sample sizes must be >= 1");
  if (config.probe_points < 2) throw UsageError("sample-error harness needs >= 2 probe points");
  const FilterSpec filter = FilterSpec::tikhonov(config.lambda);
  const SupportModel reference =
      fit(task.sample(config.reference_n, stream_seed(config.seed, 0)), kernel, filter,
          Algorithm::Spectral);

  // Probes: half on the support, half uniform over the bounding box.
  const std::size_t on_support = config.probe_points / 2;
  const std::size_t in_box = config.probe_points - on_support;
  PointMatrix probes(static_cast<Eigen::Index>(config.probe_points), task.dimension());
  probes.topRows(static_cast<Eigen::Index>(on_support)) =
      task.sample(on_support, stream_seed(config.seed, 1));
  {
    std::mt19937_64 rng(stream_seed(config.seed, 2));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Vector lo = task.box_lower();
    const Vector hi = task.box_upper();
    for (std::size_t i = 0; i < in_box; ++i) {
      const auto row = static_cast<Eigen::Index>(on_support + i);
      for (Eigen::Index k = 0; k < task.dimension(); ++k) {
        probes(row, k) = lo(k) + (hi(k) - lo(k)) * unit(rng);
      }
    }
  }
  const Vector population = score_batch(reference, probes);
  const double n_lambda = effective_dimension(reference.decomposition(), config.lambda);
  const double bound =
      sample_error_bound(static_cast<double>(config.n), config.lambda, config.delta, n_lambda);

  HarnessResult r;
  r.name = "sample-error";
  r.note = "G_lambda and N(lambda)=" + format_real(n_lambda, 9) + " from a " +
           std::to_string(config.reference_n) + "-point reference fit; sup over " +
           std::to_string(config.probe_points) + " probes";
  for (std::size_t t = 0; t < config.trials; ++t) {
    const SupportModel model = fit(task.sample(config.n, stream_seed(config.seed, t + 3)), kernel,
                                   filter, Algorithm::Spectral);
    const double observed = (score_batch(model, probes) - population).cwiseAbs().maxCoeff();
    r.rows.push_back({t, config.n, config.delta, observed, bound, observed > bound});
  }
  finish(r, config.delta);
  return r;
}

}  // namespace kernsupp
