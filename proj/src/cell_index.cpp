#include "gibbs/cell_index.hpp"

#include <algorithm>
#include <cmath>

namespace gibbs {

namespace {

// Keeps the grid from dwarfing the point set when the query radius is tiny.
int capped_cells_per_axis(int dim, double extent, double cell_side, std::size_t points) {
  const double fit = std::floor(extent / cell_side);
  const double budget = std::max<double>(64.0, 4.0 * static_cast<double>(points));
  const double cap = std::max(1.0, std::floor(std::pow(budget, 1.0 / dim)));
  return static_cast<int>(std::max(1.0, std::min(fit, cap)));
}

}  // namespace

CellIndex::CellIndex(GridDomain domain, std::span<const double> coords, double cell_side)
    : domain_(domain), coords_(coords.begin(), coords.end()) {
  if (domain_.dim < 1) throw Error(ErrorCode::InvalidArgument, "grid dimension must be positive");
  if (!(cell_side > 0.0)) throw Error(ErrorCode::InvalidArgument, "cell side must be positive");
  if (!(domain_.extent > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid extent must be positive");
  if (coords_.size() % dim() != 0) {
    throw Error(ErrorCode::InvalidArgument, "coordinate count not a multiple of the dimension");
  }
  cells_per_axis_ = capped_cells_per_axis(domain_.dim, domain_.extent, cell_side, size());
  width_ = domain_.extent / cells_per_axis_;
  std::size_t total = 1;
  for (int a = 0; a < domain_.dim; ++a) total *= static_cast<std::size_t>(cells_per_axis_);
  cells_.resize(total);
  cell_of_point_.resize(size());
  for (std::size_t id = 0; id < size(); ++id) {
    const std::size_t c = cell_of(point(id));
    cells_[c].push_back(id);
    cell_of_point_[id] = c;
  }
}

int CellIndex::axis_cell(double x) const {
  const int c = static_cast<int>(std::floor((x - domain_.lower) / width_));
  return std::clamp(c, 0, cells_per_axis_ - 1);
}

std::size_t CellIndex::cell_of(std::span<const double> x) const {
  std::size_t cell = 0;
  for (std::size_t a = dim(); a-- > 0;) {
    cell = cell * static_cast<std::size_t>(cells_per_axis_) + static_cast<std::size_t>(axis_cell(x[a]));
  }
  return cell;
}

void CellIndex::check_radius(double radius) const {
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "query radius must be nonnegative");
  if (radius > width_ * (1.0 + 1e-12)) {
    throw Error(ErrorCode::RadiusTooLarge, "query radius exceeds the cell width of the index");
  }
  if (domain_.periodic && 2.0 * radius >= domain_.extent) {
    throw Error(ErrorCode::RadiusTooLarge, "periodized ball would overlap itself (2*rho >= w_n)");
  }
}

void CellIndex::relocate(std::size_t id, std::span<const double> position) {
  std::copy(position.begin(), position.end(), coords_.begin() + static_cast<std::ptrdiff_t>(id * dim()));
  const std::size_t next = cell_of(position);
  const std::size_t prev = cell_of_point_[id];
  if (next == prev) return;
  auto& from = cells_[prev];
  from.erase(std::find(from.begin(), from.end(), id));
  cells_[next].push_back(id);
  cell_of_point_[id] = next;
}

std::vector<std::size_t> CellIndex::ball(std::span<const double> center, double radius) const {
  std::vector<std::size_t> ids;
  visit_ball(center, radius, [&ids](std::size_t id, std::span<const double>, double) { ids.push_back(id); });
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace gibbs
