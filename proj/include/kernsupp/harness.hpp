#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kernsupp/kernels.hpp"
#include "kernsupp/synth.hpp"

namespace kernsupp {

/// Independent per-trial seed derived from a base seed (splitmix64).
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream);

/// One Monte-Carlo trial of an observed-vs-bound comparison.
struct BoundRow {
  std::size_t trial = 0;
  std::size_t n = 0;
  double delta = 0.0;
  double observed = 0.0;
  double bound = 0.0;
  bool violated = false;
};

struct HarnessResult {
  std::string name;
  std::vector<BoundRow> rows;
  double violation_fraction = 0.0;
  double allowed_fraction = 0.0;  ///< 2 exp(-delta)
  std::string note;

  bool passed() const { return violation_fraction <= allowed_fraction; }
};

struct ConcentrationConfig {
  std::size_t n = 100;
  double delta = 2.0;
  std::size_t trials = 500;
  std::size_t reference_n = 20000;
  std::uint64_t seed = 1;
};

/// |T_n - T|_HS against 2 max(delta, sqrt(2 delta)) / sqrt(n). The unknown
/// population operator T is replaced by the empirical operator of a large
/// independent reference sample.
HarnessResult concentration_harness(const SyntheticTask& task, const KernelSpec& kernel,
                                    const ConcentrationConfig& config);

struct BernsteinConfig {
  std::size_t n = 100;
  double delta = 2.0;
  std::size_t trials = 2000;
  std::uint64_t seed = 1;
};

/// Sample means of i.i.d. +/-1 coin flips (mean 0, |Z| <= 1, E Z^2 = 1)
/// against M delta / n + sqrt(2 sigma^2 delta / n) with M = sigma^2 = 1.
HarnessResult bernstein_coin_harness(const BernsteinConfig& config);

struct SampleErrorConfig {
  std::size_t n = 100;
  double lambda = 0.1;
  double delta = 2.0;
  std::size_t trials = 20;
  std::size_t reference_n = 1000;
  std::size_t probe_points = 400;
  std::uint64_t seed = 1;
};

/// sup_x |F_n(x) - G_lambda(x)| for Tikhonov against the sample-error
/// bound. G_lambda is replaced by the Tikhonov score of a large reference
/// sample, and N(lambda) by the reference sample's effective dimension; the
/// supremum runs over probe points on and around the support.
HarnessResult sample_error_harness(const SyntheticTask& task, const KernelSpec& kernel,
                                   const SampleErrorConfig& config);

}  // namespace kernsupp
