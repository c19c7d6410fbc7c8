#include "gibbs/torus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gibbs/cell_index.hpp"
#include "gibbs/error.hpp"

namespace gibbs {

TorusWindow::TorusWindow(int dim, double intensity, std::size_t point_budget)
    : dim_(dim), intensity_(intensity), n_(point_budget) {
  if (dim < 2) throw Error(ErrorCode::InvalidArgument, "dimension must be at least 2");
  if (!(intensity > 0.0) || !std::isfinite(intensity)) {
    throw Error(ErrorCode::InvalidArgument, "intensity must be positive");
  }
  if (point_budget < 1) throw Error(ErrorCode::InvalidArgument, "point budget must be >= 1");
  const double volume = static_cast<double>(n_) / intensity_;
  side_ = dim_ == 2 ? std::sqrt(volume) : (dim_ == 3 ? std::cbrt(volume) : std::pow(volume, 1.0 / dim_));
}

double TorusWindow::volume() const { return static_cast<double>(n_) / intensity_; }

bool TorusWindow::contains(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(dim_)) return false;
  const double h = half_side();
  return std::all_of(x.begin(), x.end(), [h](double v) { return v >= -h && v < h; });
}

double wrap_coordinate(double value, double side) {
  const double h = 0.5 * side;
  double v = value - side * std::floor((value + h) / side);
  // Round-off can land exactly on the excluded upper face.
  if (v >= h) v -= side;
  if (v < -h) v = -h;
  return v;
}

Point TorusWindow::wrap(std::span<const double> x) const {
  Point out(x.begin(), x.end());
  for (double& v : out) v = wrap_coordinate(v, side_);
  return out;
}

void TorusWindow::displacement(std::span<const double> x, std::span<const double> y,
                               std::span<double> out) const {
  const double h = half_side();
  for (int i = 0; i < dim_; ++i) {
    double delta = y[i] - x[i];
    if (delta >= h) {
      delta -= side_;
    } else if (delta < -h) {
      delta += side_;
    }
    out[i] = delta;
  }
}

namespace {

void check_inside(const TorusWindow& w, std::span<const double> x) {
  if (!w.contains(x)) {
    std::ostringstream msg;
    msg << "point (";
    for (std::size_t i = 0; i < x.size(); ++i) msg << (i ? "," : "") << x[i];
    msg << ") outside window of side " << w.side();
    throw Error(ErrorCode::PointOutsideWindow, msg.str());
  }
}

}  // namespace

Configuration::Configuration(TorusWindow window) : window_(window) {}

Configuration::Configuration(TorusWindow window, std::vector<double> coords)
    : window_(window), coords_(std::move(coords)) {
  const auto d = static_cast<std::size_t>(window_.dim());
  if (coords_.size() % d != 0) {
    throw Error(ErrorCode::InvalidArgument, "coordinate count not a multiple of the dimension");
  }
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) check_inside(window_, point(i));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    const auto pa = point(a);
    const auto pb = point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  });
  for (std::size_t k = 1; k < n; ++k) {
    const auto pa = point(order[k - 1]);
    const auto pb = point(order[k]);
    if (std::equal(pa.begin(), pa.end(), pb.begin())) {
      throw Error(ErrorCode::DuplicatePoint, "configuration points must be distinct");
    }
  }
}

namespace {

std::vector<double> flatten(const TorusWindow& w, const std::vector<Point>& points) {
  std::vector<double> flat;
  flat.reserve(points.size() * static_cast<std::size_t>(w.dim()));
  for (const auto& p : points) {
    if (p.size() != static_cast<std::size_t>(w.dim())) {
      throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
    }
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return flat;
}

}  // namespace

Configuration::Configuration(TorusWindow window, const std::vector<Point>& points)
    : Configuration(window, flatten(window, points)) {}

double torus_distance_squared(std::span<const double> x, std::span<const double> y,
                              const TorusWindow& w) {
  check_inside(w, x);
  check_inside(w, y);
  const double h = w.half_side();
  double acc = 0.0;
  for (int i = 0; i < w.dim(); ++i) {
    double delta = std::abs(y[i] - x[i]);
    if (delta > h) delta = w.side() - delta;
    acc += delta * delta;
  }
  return acc;
}

double torus_distance(std::span<const double> x, std::span<const double> y, const TorusWindow& w) {
  return std::sqrt(torus_distance_squared(x, y, w));
}

std::vector<std::size_t> periodic_ball_points(const Configuration& omega,
                                              std::span<const double> center, double radius) {
  const TorusWindow& w = omega.window();
  check_inside(w, center);
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  if (2.0 * radius >= w.side()) {
    throw Error(ErrorCode::RadiusTooLarge, "periodized ball would overlap itself (2*rho >= w_n)");
  }
  const CellIndex index(GridDomain::torus(w), omega.coords(), radius);
  return index.ball(center, radius);
}

std::size_t periodic_cube_count(const Configuration& omega, std::span<const double> center,
                                double side) {
  const TorusWindow& w = omega.window();
  check_inside(w, center);
  if (!(side > 0.0)) throw Error(ErrorCode::InvalidArgument, "cube side must be positive");
  if (side > w.side()) throw Error(ErrorCode::SideTooLarge, "cube side exceeds window side");
  const double half = 0.5 * side;
  std::vector<double> delta(static_cast<std::size_t>(w.dim()));
  std::size_t count = 0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    w.displacement(center, omega.point(i), delta);
    bool inside = true;
    for (double v : delta) {
      if (v < -half || v >= half) {
        inside = false;
        break;
      }
    }
    if (inside) ++count;
  }
  return count;
}

}  // namespace gibbs
