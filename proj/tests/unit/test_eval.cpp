#include <doctest.h>

#include <cmath>
#include <random>

#include "kernsupp/error.hpp"
#include "kernsupp/eval.hpp"
#include "test_util.hpp"

using namespace kernsupp;
using kernsupp::testing::point;
using kernsupp::testing::random_points;

namespace {

PointMatrix line(std::initializer_list<double> xs) {
  PointMatrix p(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) p(i++, 0) = x;
  return p;
}

// Pairwise Mann-Whitney oracle.
double pairwise_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos) {
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / static_cast<double>(pos.size() * neg.size());
}

std::vector<std::uint8_t> interval(double lo, double hi, double step, int cells) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(cells));
  for (int i = 0; i < cells; ++i) {
    const double x = (i + 0.5) * step;
    out[static_cast<std::size_t>(i)] = x >= lo && x <= hi;
  }
  return out;
}

}  // namespace

TEST_CASE("hausdorff examples") {
  CHECK(hausdorff(line({0}), line({1})) == 1.0);
  CHECK(hausdorff(line({0}), line({0, 1})) == 1.0);
  CHECK(directed_hausdorff(line({0}), line({0, 1})) == 0.0);
  std::mt19937_64 rng(1);
  const PointMatrix a = random_points(rng, 20, 3);
  CHECK(hausdorff(a, a) == 0.0);
  CHECK_THROWS_AS(hausdorff(PointMatrix(0, 1), line({0})), DataError);

  const auto abel = KernelSpec::abel(1.0);
  CHECK(hausdorff(line({0}), line({1}), Metric::induced(abel)) ==
        doctest::Approx(1.12438477295680029891648).epsilon(1e-14));
}

TEST_CASE("property: hausdorff is a metric on finite sets") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const PointMatrix a = random_points(rng, 6, 2);
    const PointMatrix b = random_points(rng, 9, 2);
    const PointMatrix c = random_points(rng, 4, 2);
    CHECK(hausdorff(a, b) == hausdorff(b, a));
    CHECK(hausdorff(a, b) <= hausdorff(a, c) + hausdorff(c, b) + 1e-15);
    CHECK(hausdorff(a, b) > 0.0);
    const PointMatrix reordered = a.colwise().reverse();
    CHECK(hausdorff(a, reordered) == 0.0);
  }
}

TEST_CASE("symmetric difference measure") {
  const auto a = interval(0, 1, 0.01, 300);
  const auto b = interval(0, 2, 0.01, 300);
  CHECK(symdiff_measure(a, a, 0.01) == 0.0);
  CHECK(std::abs(symdiff_measure(a, b, 0.01) - 1.0) <= 0.01 + 1e-12);
  const auto c = interval(1.5, 2.5, 0.01, 300);
  CHECK(std::abs(symdiff_measure(a, c, 0.01) - 2.0) <= 0.02 + 1e-12);
  CHECK_THROWS_AS(symdiff_measure(a, interval(0, 1, 0.01, 10), 0.01), DataError);

  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.4);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::uint8_t> x(64), y(64), z(64);
    for (std::size_t i = 0; i < 64; ++i) {
      x[i] = coin(rng);
      y[i] = coin(rng);
      z[i] = coin(rng);
    }
    CHECK(symdiff_measure(x, y, 0.5) == symdiff_measure(y, x, 0.5));
    CHECK(symdiff_measure(x, y, 0.5) <= symdiff_measure(x, z, 0.5) + symdiff_measure(z, y, 0.5));
  }
}

TEST_CASE("ROC / AUC examples") {
  const double sep_pos[] = {0.9, 0.8};
  const double sep_neg[] = {0.3, 0.1};
  CHECK(roc_auc(sep_pos, sep_neg).auc == 1.0);

  const double eq_pos[] = {0.5, 0.5, 0.5};
  const double eq_neg[] = {0.5, 0.5};
  const auto tied = roc_auc(eq_pos, eq_neg);
  CHECK(tied.auc == 0.5);
  CHECK(tied.points.size() == 2);

  // pairs (0.9,0.85) (0.9,0.1) (0.8,0.1) are wins, (0.8,0.85) is a loss
  const double pos[] = {0.9, 0.8};
  const double neg[] = {0.85, 0.1};
  CHECK(roc_auc(pos, neg).auc == 0.75);

  const auto roc = roc_auc(pos, neg);
  CHECK(roc.points.front().false_positive_rate == 0.0);
  CHECK(roc.points.front().true_positive_rate == 0.0);
  CHECK(roc.points.back().false_positive_rate == 1.0);
  CHECK(roc.points.back().true_positive_rate == 1.0);
  CHECK(roc.points.size() == 5);

  CHECK_THROWS_AS(roc_auc(pos, std::span<const double>()), DataError);
}

TEST_CASE("property: AUC matches the pairwise oracle and its invariances") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> level(0, 9);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> pos(13), neg(17);
    for (auto& v : pos) v = 0.1 * level(rng) + 0.05;
    for (auto& v : neg) v = 0.1 * level(rng);
    const double auc = roc_auc(pos, neg).auc;
    CHECK(auc == doctest::Approx(pairwise_auc(pos, neg)).epsilon(1e-14));

    std::vector<double> tp(pos), tn(neg);
    for (auto& v : tp) v = std::exp(3.0 * v) - 7.0;
    for (auto& v : tn) v = std::exp(3.0 * v) - 7.0;
    CHECK(roc_auc(tp, tn).auc == doctest::Approx(auc).epsilon(1e-14));

    // label swap in the tie-free case
    CHECK(roc_auc(neg, pos).auc == doctest::Approx(1.0 - auc).epsilon(1e-14));
  }
}

TEST_CASE("Parzen baseline") {
  const PointMatrix one = line({0.0});
  CHECK(parzen_score(one, 0.5, point({0.0})) == 2.0);
  CHECK(parzen_score(one, 0.5, point({0.5})) == doctest::Approx(std::exp(-1.0) / 0.5).epsilon(1e-15));
  CHECK_THROWS_AS(parzen_score(one, 0.0, point({0.0})), UsageError);

  // Unnormalized profile: in 1-D the mass is 2, not 1.
  double mass = 0.0;
  const double step = 1e-3;
  for (double x = -20.0; x < 20.0; x += step) mass += step * parzen_score(one, 0.3, point({x + 0.5 * step}));
  CHECK(mass == doctest::Approx(2.0).epsilon(1e-5));

  std::mt19937_64 rng(6);
  const PointMatrix train = random_points(rng, 10, 2);
  const PointMatrix test = random_points(rng, 5, 2);
  const Vector batch = parzen_scores(train, 0.2, test);
  for (Eigen::Index j = 0; j < 5; ++j) CHECK(batch(j) == parzen_score(train, 0.2, test.row(j).transpose()));
}

TEST_CASE("Devroye-Wise baseline") {
  const PointMatrix train = line({0.0, 4.0});
  CHECK(devroye_wise_member(train, 0.1, point({4.0})));
  CHECK_FALSE(devroye_wise_member(train, 0.5, point({2.0})));
  CHECK(devroye_wise_member(train, 0.25, point({0.25})));
  CHECK_THROWS_AS(devroye_wise_member(train, 0.0, point({0.0})), UsageError);
}
