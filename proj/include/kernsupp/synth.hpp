#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kernsupp/types.hpp"

namespace kernsupp {

/// Sampler with a known support, for convergence and quality experiments.
///
/// Shipped tasks (all in R^2 unless noted):
///   circle        uniform angle on the unit circle
///   segment       {(t, 0) : t in [0, 1]}
///   moon_upper    upper unit half circle centred at the origin
///   moon_lower    lower unit half circle centred at (1, 0.5)
///   two_moons     union of the two moons, each drawn with probability 1/2
///   two_circles   unit circles centred at (-1.5, 0) and (1.5, 0)
///   noisy_circle  circle plus Gaussian noise of level eta along the normal
///   cube          uniform on [0, 1]^d (full-dimensional; `cube:3` for d=3)
class SyntheticTask {
public:
  enum class Kind { Circle, Segment, MoonUpper, MoonLower, TwoMoons, TwoCircles, NoisyCircle, Cube };

  /// Looks a task up by name. `noise` is used by noisy_circle only.
  static SyntheticTask make(std::string_view name, double noise = 0.1);
  static std::vector<std::string> names();

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  Eigen::Index dimension() const { return dimension_; }
  double noise() const { return noise_; }
  /// Full-dimensional supports are not thickened in the reference grid.
  bool full_dimensional() const { return kind_ == Kind::Cube; }

  /// n i.i.d. draws; identical seeds give bit-identical samples.
  PointMatrix sample(std::size_t n, std::uint64_t seed) const;

  /// Euclidean distance to the noiseless support set.
  double distance_to_support(PointRef x) const;

  /// Dense discretization of the (noiseless) support: `count` points per
  /// curve for one-dimensional supports, a count^d lattice for the cube.
  PointMatrix reference_support(std::size_t count = 2000) const;

  Vector box_lower() const;
  Vector box_upper() const;

private:
  SyntheticTask() = default;

  Kind kind_ = Kind::Circle;
  std::string name_;
  Eigen::Index dimension_ = 2;
  double noise_ = 0.0;
};

/// Regular lattice over the task's bounding box with ground-truth
/// membership. Lower-dimensional supports are thickened by one grid step
/// (plus three noise levels for noisy_circle).
struct ReferenceGrid {
  PointMatrix points;
  std::vector<std::uint8_t> inside;
  double step = 0.0;         ///< largest per-axis spacing
  double cell_volume = 0.0;  ///< product of per-axis spacings
  std::size_t resolution = 0;
};

/// `resolution` lattice points per axis, endpoints included (>= 2).
ReferenceGrid reference_grid(const SyntheticTask& task, std::size_t resolution);

}  // namespace kernsupp
