#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gibbs {

using Point = std::vector<double>;

/// The periodic cube W_n = [-w/2, w/2)^d of volume n / lambda.
class TorusWindow {
 public:
  TorusWindow(int dim, double intensity, std::size_t point_budget);

  int dim() const { return dim_; }
  double intensity() const { return intensity_; }
  std::size_t point_budget() const { return n_; }
  double side() const { return side_; }
  double half_side() const { return 0.5 * side_; }
  double volume() const;

  /// Half-open membership: every coordinate in [-w/2, w/2).
  bool contains(std::span<const double> x) const;
  /// Maps an arbitrary point back into the half-open cube.
  Point wrap(std::span<const double> x) const;
  /// Minimum-image displacement y - x written into `out`.
  void displacement(std::span<const double> x, std::span<const double> y,
                    std::span<double> out) const;

  friend bool operator==(const TorusWindow&, const TorusWindow&) = default;

 private:
  int dim_;
  double intensity_;
  std::size_t n_;
  double side_;
};

/// Wraps a single coordinate into [-w/2, w/2).
double wrap_coordinate(double value, double side);

/// Finite simple point set inside a window. Point ids are array positions.
class Configuration {
 public:
  explicit Configuration(TorusWindow window);
  /// `coords` is row-major, `dim` values per point. Validates membership and
  /// distinctness.
  Configuration(TorusWindow window, std::vector<double> coords);
  Configuration(TorusWindow window, const std::vector<Point>& points);

  const TorusWindow& window() const { return window_; }
  int dim() const { return window_.dim(); }
  std::size_t size() const { return coords_.size() / static_cast<std::size_t>(window_.dim()); }
  bool empty() const { return coords_.empty(); }

  std::span<const double> point(std::size_t id) const {
    const auto d = static_cast<std::size_t>(window_.dim());
    return {coords_.data() + id * d, d};
  }
  std::span<const double> coords() const { return coords_; }

 private:
  TorusWindow window_;
  std::vector<double> coords_;
};

double torus_distance(std::span<const double> x, std::span<const double> y, const TorusWindow& w);
double torus_distance_squared(std::span<const double> x, std::span<const double> y,
                              const TorusWindow& w);

/// Ids (ascending) of configuration points in the closed periodic ball b^(n)(center, radius).
std::vector<std::size_t> periodic_ball_points(const Configuration& omega,
                                              std::span<const double> center, double radius);

/// Points in the periodized half-open cube center + [-s/2, s/2)^d.
std::size_t periodic_cube_count(const Configuration& omega, std::span<const double> center,
                                double side);

}  // namespace gibbs
