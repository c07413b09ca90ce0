#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kernsupp/kernels.hpp"
#include "kernsupp/types.hpp"

namespace kernsupp {

/// Euclidean distance, or the kernel-induced metric when a kernel is given.
struct Metric {
  std::optional<KernelSpec> kernel;

  static Metric euclidean() { return {}; }
  static Metric induced(const KernelSpec& k) { return {k}; }
  double operator()(PointRef a, PointRef b) const;
};

/// Hausdorff distance between two finite point sets.
double hausdorff(PointMatrixRef a, PointMatrixRef b, const Metric& metric = Metric::euclidean());

/// One-sided sup_{a in A} d(a, B).
double directed_hausdorff(PointMatrixRef a, PointMatrixRef b,
                          const Metric& metric = Metric::euclidean());

/// cell_volume * #{cells where the indicators differ}.
double symdiff_measure(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                       double cell_volume);

struct LabeledScore {
  double score;
  bool positive;
};

struct RocPoint {
  double threshold;
  double false_positive_rate;
  double true_positive_rate;
};

struct RocResult {
  std::vector<RocPoint> points;  ///< from (0,0) to (1,1), one per distinct threshold
  double auc = 0.0;              ///< Mann-Whitney, ties count one half
};

RocResult roc_auc(std::span<const LabeledScore> scores);
RocResult roc_auc(std::span<const double> positives, std::span<const double> negatives);

/// Unnormalized Parzen estimate (1 / (n h^d)) sum_i exp(-|x - x_i| / h).
double parzen_score(PointMatrixRef train, double h, PointRef x);
Vector parzen_scores(PointMatrixRef train, double h, PointMatrixRef points);

/// Closed-ball union: true iff min_i |x - x_i| <= eps.
bool devroye_wise_member(PointMatrixRef train, double eps, PointRef x);

}  // namespace kernsupp
