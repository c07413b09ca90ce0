#include "kernsupp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kernsupp/error.hpp"
#include "kernsupp/format.hpp"

namespace kernsupp {

double Metric::operator()(PointRef a, PointRef b) const {
  if (kernel) return induced_metric(*kernel, a, b);
  return (a - b).norm();
}

double directed_hausdorff(PointMatrixRef a, PointMatrixRef b, const Metric& metric) {
  if (a.rows() == 0 || b.rows() == 0) throw DataError("Hausdorff distance of an empty set");
  if (a.cols() != b.cols()) throw DataError("Hausdorff distance: dimension mismatch");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < b.rows() && nearest > worst; ++j) {
      nearest = std::min(nearest, metric(a.row(i).transpose(), b.row(j).transpose()));
    }
    worst = std::max(worst, nearest);
  }
  return worst;
}

double hausdorff(PointMatrixRef a, PointMatrixRef b, const Metric& metric) {
  return std::max(directed_hausdorff(a, b, metric), directed_hausdorff(b, a, metric));
}

double symdiff_measure(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                       double cell_volume) {
  if (a.size() != b.size()) throw DataError("symmetric difference: indicators on different grids");
  if (!(cell_volume > 0.0)) throw UsageError("cell volume must be positive");
  std::size_t differing = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differing += (a[i] != 0) != (b[i] != 0);
  return cell_volume * static_cast<double>(differing);
}

RocResult roc_auc(std::span<const LabeledScore> scores) {
  std::vector<LabeledScore> sorted(scores.begin(), scores.end());
  const auto pos = static_cast<double>(
      std::count_if(sorted.begin(), sorted.end(), [](const auto& s) { return s.positive; }));
  const double neg = static_cast<double>(sorted.size()) - pos;
  if (pos == 0 || neg == 0) throw DataError("ROC/AUC needs both positive and negative labels");
  for (const auto& s : sorted) {
    if (std::isnan(s.score)) throw DataError("ROC/AUC: NaN score");
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.score > b.score; });

  RocResult out;
  out.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  double tp = 0.0;
  double fp = 0.0;
  double area = 0.0;  // positive-wins, in units of pos * neg pairs
  for (std::size_t i = 0; i < sorted.size();) {
    const double threshold = sorted[i].score;
    double tp_block = 0.0;
    double fp_block = 0.0;
    for (; i < sorted.size() && sorted[i].score == threshold; ++i) {
      (sorted[i].positive ? tp_block : fp_block) += 1.0;
    }
    // Pairs strictly ranked above plus half of the tied pairs.
    area += fp_block * (tp + 0.5 * tp_block);
    tp += tp_block;
    fp += fp_block;
    out.points.push_back({threshold, fp / neg, tp / pos});
  }
  out.auc = area / (pos * neg);
  return out;
}

RocResult roc_auc(std::span<const double> positives, std::span<const double> negatives) {
  std::vector<LabeledScore> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) all.push_back({s, true});
  for (double s : negatives) all.push_back({s, false});
  return roc_auc(all);
}

double parzen_score(PointMatrixRef train, double h, PointRef x) {
  if (!(h > 0.0)) throw UsageError("Parzen window width must be positive");
  if (train.rows() == 0) throw DataError("Parzen estimate needs training points");
  if (x.size() != train.cols()) throw DataError("Parzen estimate: dimension mismatch");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < train.rows(); ++i) {
    sum += std::exp(-(x - train.row(i).transpose()).norm() / h);
  }
  const double d = static_cast<double>(train.cols());
  return sum / (static_cast<double>(train.rows()) * std::pow(h, d));
}

Vector parzen_scores(PointMatrixRef train, double h, PointMatrixRef points) {
  Vector out(points.rows());
  for (Eigen::Index j = 0; j < points.rows(); ++j) {
    out(j) = parzen_score(train, h, points.row(j).transpose());
  }
  return out;
}

bool devroye_wise_member(PointMatrixRef train, double eps, PointRef x) {
  if (!(eps > 0.0)) throw UsageError("ball radius must be positive");
  if (x.size() != train.cols()) throw DataError("Devroye-Wise: dimension mismatch");
  for (Eigen::Index i = 0; i < train.rows(); ++i) {
    if ((x - train.row(i).transpose()).norm() <= eps) return true;
  }
  return false;
}

}  // namespace kernsupp
