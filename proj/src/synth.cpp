#include "kernsupp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "kernsupp/error.hpp"
#include "kernsupp/format.hpp"

namespace kernsupp {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Vector2d upper_moon(double t) { return {std::cos(t), std::sin(t)}; }
Eigen::Vector2d lower_moon(double t) { return {1.0 - std::cos(t), 0.5 - std::sin(t)}; }

// Distance from p to the unit half circle around `centre` lying on the
// side `upper` (y >= centre.y) or below it.
double half_circle_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& centre, bool upper) {
  const Eigen::Vector2d v = p - centre;
  const bool on_arc_side = upper ? v.y() >= 0.0 : v.y() <= 0.0;
  if (on_arc_side) return std::abs(v.norm() - 1.0);
  const Eigen::Vector2d e(1.0, 0.0);
  return std::min((v - e).norm(), (v + e).norm());
}

}  // namespace

SyntheticTask SyntheticTask::make(std::string_view name, double noise) {
  SyntheticTask t;
  t.name_ = std::string(name);
  t.dimension_ = 2;
  if (name == "circle") {
    t.kind_ = Kind::Circle;
  } else if (name == "segment") {
    t.kind_ = Kind::Segment;
  } else if (name == "moon_upper") {
    t.kind_ = Kind::MoonUpper;
  } else if (name == "moon_lower") {
    t.kind_ = Kind::MoonLower;
  } else if (name == "two_moons") {
    t.kind_ = Kind::TwoMoons;
  } else if (name == "two_circles") {
    t.kind_ = Kind::TwoCircles;
  } else if (name == "noisy_circle") {
    if (!(noise > 0.0)) throw UsageError("noisy_circle needs a positive noise level");
    t.kind_ = Kind::NoisyCircle;
    t.noise_ = noise;
  } else if (name == "cube" || name.starts_with("cube:")) {
    t.kind_ = Kind::Cube;
    if (name.size() > 4) {
      t.dimension_ = static_cast<Eigen::Index>(parse_integer(name.substr(5), "cube dimension"));
      if (t.dimension_ < 1) throw UsageError("cube dimension must be >= 1");
    }
  } else {
    throw UsageError("unknown synthetic task '" + std::string(name) + "'");
  }
  return t;
}

std::vector<std::string> SyntheticTask::names() {
  return {"circle",      "segment",      "moon_upper", "moon_lower",
          "two_moons",   "two_circles",  "noisy_circle", "cube"};
}

PointMatrix SyntheticTask::sample(std::size_t n, std::uint64_t seed) const {
  if (n < 1) throw UsageError("sample size must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  PointMatrix out(static_cast<Eigen::Index>(n), dimension_);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    switch (kind_) {
      case Kind::Circle: {
        const double a = 2.0 * kPi * unit(rng);
        out.row(i) << std::cos(a), std::sin(a);
        break;
      }
      case Kind::NoisyCircle: {
        const double a = 2.0 * kPi * unit(rng);
        const double r = 1.0 + noise_ * normal(rng);
        out.row(i) << r * std::cos(a), r * std::sin(a);
        break;
      }
      case Kind::Segment: out.row(i) << unit(rng), 0.0; break;
      case Kind::MoonUpper: out.row(i) = upper_moon(kPi * unit(rng)).transpose(); break;
      case Kind::MoonLower: out.row(i) = lower_moon(kPi * unit(rng)).transpose(); break;
      case Kind::TwoMoons: {
        const bool upper = unit(rng) < 0.5;
        const double t = kPi * unit(rng);
        out.row(i) = (upper ? upper_moon(t) : lower_moon(t)).transpose();
        break;
      }
      case Kind::TwoCircles: {
        const double cx = unit(rng) < 0.5 ? -1.5 : 1.5;
        const double a = 2.0 * kPi * unit(rng);
        out.row(i) << cx + std::cos(a), std::sin(a);
        break;
      }
      case Kind::Cube:
        for (Eigen::Index k = 0; k < dimension_; ++k) out(i, k) = unit(rng);
        break;
    }
  }
  return out;
}

double SyntheticTask::distance_to_support(PointRef x) const {
  if (x.size() != dimension_) throw DataError("point dimension does not match the task");
  if (kind_ == Kind::Cube) {
    return (x - x.cwiseMax(0.0).cwiseMin(1.0)).norm();
  }
  const Eigen::Vector2d p(x(0), x(1));
  switch (kind_) {
    case Kind::Circle:
    case Kind::NoisyCircle: return std::abs(p.norm() - 1.0);
    case Kind::Segment: {
      const Eigen::Vector2d q(std::clamp(p.x(), 0.0, 1.0), 0.0);
      return (p - q).norm();
    }
    case Kind::MoonUpper: return half_circle_distance(p, {0.0, 0.0}, true);
    case Kind::MoonLower: return half_circle_distance(p, {1.0, 0.5}, false);
    case Kind::TwoMoons:
      return std::min(half_circle_distance(p, {0.0, 0.0}, true),
                      half_circle_distance(p, {1.0, 0.5}, false));
    case Kind::TwoCircles:
      return std::min(std::abs((p - Eigen::Vector2d(-1.5, 0.0)).norm() - 1.0),
                      std::abs((p - Eigen::Vector2d(1.5, 0.0)).norm() - 1.0));
    case Kind::Cube: break;
  }
  return 0.0;
}

PointMatrix SyntheticTask::reference_support(std::size_t count) const {
  if (count < 2) throw UsageError("reference support needs at least 2 points per curve");
  const auto c = static_cast<Eigen::Index>(count);
  const auto arc = [&](auto curve, double t0, double t1, bool closed) {
    PointMatrix out(c, 2);
    const double span = t1 - t0;
    for (Eigen::Index i = 0; i < c; ++i) {
      const double t = t0 + span * static_cast<double>(i) / static_cast<double>(closed ? c : c - 1);
      out.row(i) = curve(t).transpose();
    }
    return out;
  };
  const auto stack = [](const PointMatrix& a, const PointMatrix& b) {
    PointMatrix out(a.rows() + b.rows(), a.cols());
    out << a, b;
    return out;
  };
  const auto circle_at = [](double cx) {
    return [cx](double t) { return Eigen::Vector2d(cx + std::cos(t), std::sin(t)); };
  };
  switch (kind_) {
    case Kind::Circle:
    case Kind::NoisyCircle: return arc(circle_at(0.0), 0.0, 2.0 * kPi, true);
    case Kind::Segment:
      return arc([](double t) { return Eigen::Vector2d(t, 0.0); }, 0.0, 1.0, false);
    case Kind::MoonUpper: return arc(upper_moon, 0.0, kPi, false);
    case Kind::MoonLower: return arc(lower_moon, 0.0, kPi, false);
    case Kind::TwoMoons:
      return stack(arc(upper_moon, 0.0, kPi, false), arc(lower_moon, 0.0, kPi, false));
    case Kind::TwoCircles:
      return stack(arc(circle_at(-1.5), 0.0, 2.0 * kPi, true),
                   arc(circle_at(1.5), 0.0, 2.0 * kPi, true));
    case Kind::Cube: {
      Eigen::Index total = 1;
      for (Eigen::Index k = 0; k < dimension_; ++k) total *= c;
      PointMatrix out(total, dimension_);
      for (Eigen::Index i = 0; i < total; ++i) {
        Eigen::Index rest = i;
        for (Eigen::Index k = 0; k < dimension_; ++k) {
          out(i, k) = static_cast<double>(rest % c) / static_cast<double>(c - 1);
          rest /= c;
        }
      }
      return out;
    }
  }
  return {};
}

Vector SyntheticTask::box_lower() const {
  switch (kind_) {
    case Kind::Circle:
    case Kind::NoisyCircle: return Eigen::Vector2d(-1.5, -1.5);
    case Kind::Segment: return Eigen::Vector2d(-0.5, -1.0);
    case Kind::MoonUpper:
    case Kind::MoonLower:
    case Kind::TwoMoons: return Eigen::Vector2d(-1.5, -1.0);
    case Kind::TwoCircles: return Eigen::Vector2d(-3.0, -1.5);
    case Kind::Cube: return Vector::Constant(dimension_, -0.5);
  }
  return {};
}

Vector SyntheticTask::box_upper() const {
  switch (kind_) {
    case Kind::Circle:
    case Kind::NoisyCircle: return Eigen::Vector2d(1.5, 1.5);
    case Kind::Segment: return Eigen::Vector2d(1.5, 1.0);
    case Kind::MoonUpper:
    case Kind::MoonLower:
    case Kind::TwoMoons: return Eigen::Vector2d(2.5, 1.5);
    case Kind::TwoCircles: return Eigen::Vector2d(3.0, 1.5);
    case Kind::Cube: return Vector::Constant(dimension_, 1.5);
  }
  return {};
}

ReferenceGrid reference_grid(const SyntheticTask& task, std::size_t resolution) {
  if (resolution < 2) throw UsageError("grid resolution must be >= 2");
  const Vector lo = task.box_lower();
  const Vector hi = task.box_upper();
  const auto d = task.dimension();
  const auto r = static_cast<Eigen::Index>(resolution);
  const Vector steps = (hi - lo) / static_cast<double>(r - 1);

  ReferenceGrid grid;
  grid.resolution = resolution;
  grid.step = steps.maxCoeff();
  grid.cell_volume = steps.prod();
  Eigen::Index total = 1;
  for (Eigen::Index k = 0; k < d; ++k) total *= r;
  grid.points.resize(total, d);
  grid.inside.resize(static_cast<std::size_t>(total));

  const double thickness =
      task.full_dimensional() ? 0.0 : grid.step + 3.0 * task.noise();
  for (Eigen::Index i = 0; i < total; ++i) {
    Eigen::Index rest = i;
    for (Eigen::Index k = 0; k < d; ++k) {
      grid.points(i, k) = lo(k) + steps(k) * static_cast<double>(rest % r);
      rest /= r;
    }
    const double dist = task.distance_to_support(grid.points.row(i).transpose());
    grid.inside[static_cast<std::size_t>(i)] = dist <= thickness ? 1 : 0;
  }
  return grid;
}

}  // namespace kernsupp
