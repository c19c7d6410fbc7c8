#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gibbs/error.hpp"
#include "gibbs/torus.hpp"

namespace gibbs {

/// Axis-aligned cube [lower, lower + extent)^d, either periodic (a torus) or
/// open (plain Euclidean metric, nothing wraps).
struct GridDomain {
  int dim = 2;
  double lower = 0.0;
  double extent = 1.0;
  bool periodic = true;

  static GridDomain torus(const TorusWindow& w) { return {w.dim(), -w.half_side(), w.side(), true}; }
  static GridDomain open_box(int dim, double lower, double extent) { return {dim, lower, extent, false}; }
};

/// Cell list for fixed-radius neighbor queries. Owns a copy of the point
/// coordinates; `relocate` is the single mutation path and is meant for one
/// owning sampler at a time.
class CellIndex {
 public:
  /// Cells have width >= cell_side, so any ball of radius <= cell_side is
  /// covered by at most 3^d cells.
  CellIndex(GridDomain domain, std::span<const double> coords, double cell_side);

  const GridDomain& domain() const { return domain_; }
  std::size_t size() const { return coords_.size() / dim(); }
  double cell_width() const { return width_; }
  int cells_per_axis() const { return cells_per_axis_; }
  std::span<const double> point(std::size_t id) const { return {coords_.data() + id * dim(), dim()}; }

  /// Moves point `id` to `position`.
  void relocate(std::size_t id, std::span<const double> position);

  /// Calls f(id, displacement, squared distance) for every point within the
  /// closed ball. Displacement is point minus center (minimum image when periodic).
  template <class F>
  void visit_ball(std::span<const double> center, double radius, F&& f) const;

  /// Ids in the closed ball, ascending.
  std::vector<std::size_t> ball(std::span<const double> center, double radius) const;

 private:
  std::size_t dim() const { return static_cast<std::size_t>(domain_.dim); }
  int axis_cell(double x) const;
  std::size_t cell_of(std::span<const double> x) const;
  void check_radius(double radius) const;

  GridDomain domain_;
  double width_ = 1.0;
  int cells_per_axis_ = 1;
  std::vector<double> coords_;
  std::vector<std::vector<std::size_t>> cells_;
  std::vector<std::size_t> cell_of_point_;
};

template <class F>
void CellIndex::visit_ball(std::span<const double> center, double radius, F&& f) const {
  check_radius(radius);
  const std::size_t d = dim();
  const int m = cells_per_axis_;
  constexpr std::size_t kMaxDim = 8;
  if (d > kMaxDim) throw Error(ErrorCode::InvalidArgument, "dimension above 8 not supported by CellIndex");

  // Distinct neighbor cell coordinates per axis (fewer than 3 when m < 3).
  std::array<std::array<int, 3>, kMaxDim> axis_cells{};
  std::array<int, kMaxDim> axis_count{};
  for (std::size_t a = 0; a < d; ++a) {
    const int c = axis_cell(center[a]);
    int count = 0;
    for (int o = -1; o <= 1; ++o) {
      int cc = c + o;
      if (domain_.periodic) {
        cc = ((cc % m) + m) % m;
      } else if (cc < 0 || cc >= m) {
        continue;
      }
      bool seen = false;
      for (int k = 0; k < count; ++k) seen = seen || axis_cells[a][k] == cc;
      if (!seen) axis_cells[a][count++] = cc;
    }
    axis_count[a] = count;
    if (count == 0) return;
  }

  const double r2 = radius * radius;
  const double side = domain_.extent;
  const double half = 0.5 * side;
  std::array<double, kMaxDim> disp{};
  std::array<int, kMaxDim> odo{};
  while (true) {
    std::size_t cell = 0;
    for (std::size_t a = d; a-- > 0;) cell = cell * static_cast<std::size_t>(m) + static_cast<std::size_t>(axis_cells[a][odo[a]]);
    for (std::size_t id : cells_[cell]) {
      const double* p = coords_.data() + id * d;
      double dist2 = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        double delta = p[a] - center[a];
        if (domain_.periodic) {
          if (delta >= half) {
            delta -= side;
          } else if (delta < -half) {
            delta += side;
          }
        }
        disp[a] = delta;
        dist2 += delta * delta;
      }
      if (dist2 <= r2) f(id, std::span<const double>(disp.data(), d), dist2);
    }
    std::size_t a = 0;
    while (a < d && ++odo[a] == axis_count[a]) odo[a++] = 0;
    if (a == d) break;
  }
}

}  // namespace gibbs
