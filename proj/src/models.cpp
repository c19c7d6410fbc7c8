#include "gibbs/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbs/error.hpp"
#include "gibbs/numeric.hpp"

namespace gibbs {

Energy& Energy::operator+=(const Energy& other) {
  infinite = infinite || other.infinite;
  value = infinite ? 0.0 : value + other.value;
  return *this;
}

double Energy::weight(double beta) const {
  if (infinite) return beta > 0.0 ? 0.0 : 1.0;
  return std::exp(-beta * value);
}

double Energy::as_double() const { return infinite ? HUGE_VAL : value; }

LocalView gather_view(const CellIndex& index, std::span<const double> center, double radius,
                      std::optional<std::size_t> self) {
  LocalView view;
  view.dim = index.domain().dim;
  view.has_origin = self.has_value();
  index.visit_ball(center, radius, [&](std::size_t id, std::span<const double> disp, double) {
    if (self && id == *self) return;
    view.others.insert(view.others.end(), disp.begin(), disp.end());
  });
  return view;
}

namespace {

double squared_gap(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc;
}

// Number of (k-1)-subsets of the view's other points; with `clique`, only
// subsets whose members are pairwise within r (each is within r of the origin
// by construction).
double tuple_count(const LocalView& eta, int k, double r, TuplePotential phi) {
  const std::size_t m = eta.count();
  const auto need = static_cast<std::size_t>(k - 1);
  if (m < need) return 0.0;
  if (phi == TuplePotential::Constant) {
    double out = 1.0;
    for (std::size_t j = 0; j < need; ++j) out = out * static_cast<double>(m - j) / static_cast<double>(j + 1);
    return std::round(out);
  }
  const double r2 = r * r;
  auto near = [&](std::size_t a, std::size_t b) { return squared_gap(eta.point(a), eta.point(b)) <= r2; };
  double total = 0.0;
  if (need == 1) return static_cast<double>(m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      if (!near(a, b)) continue;
      if (need == 2) {
        total += 1.0;
        continue;
      }
      for (std::size_t c = b + 1; c < m; ++c) {
        if (near(a, c) && near(b, c)) total += 1.0;
      }
    }
  }
  return total;
}

std::size_t count_with_origin(const LocalView& eta) { return eta.count() + (eta.has_origin ? 1 : 0); }

void check_radius(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
}

void check_k(int k) {
  if (k < 2 || k > 4) throw Error(ErrorCode::InvalidArgument, "tuple order k must lie in {2,3,4}");
}

}  // namespace

std::string to_string(InteractionKind kind) {
  switch (kind) {
    case InteractionKind::Strauss:
      return "strauss";
    case InteractionKind::KWise:
      return "kwise";
    case InteractionKind::HardCore:
      return "hardcore";
    case InteractionKind::TruncatedHardCore:
      return "truncated-hardcore";
  }
  return "unknown";
}

InteractionModel InteractionModel::strauss(double gamma, double r) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::InvalidArgument, "Strauss gamma must lie in (0,1]");
  check_radius(r, "interaction radius r");
  InteractionModel m;
  m.kind_ = InteractionKind::Strauss;
  m.gamma_ = gamma;
  m.radius_ = r;
  return m;
}

InteractionModel InteractionModel::kwise(int k, double r, TuplePotential phi, double c) {
  check_k(k);
  check_radius(r, "interaction radius r");
  if (!(c >= 0.0) || !std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "tuple potential bound must be >= 0");
  InteractionModel m;
  m.kind_ = InteractionKind::KWise;
  m.k_ = k;
  m.radius_ = r;
  m.phi_ = phi;
  m.c_ = c;
  return m;
}

InteractionModel InteractionModel::hard_core(double R) {
  check_radius(R, "hard-core radius R");
  InteractionModel m;
  m.kind_ = InteractionKind::HardCore;
  m.radius_ = R;
  return m;
}

InteractionModel InteractionModel::truncated_hard_core(double R, double s) {
  check_radius(R, "hard-core radius R");
  if (!(s >= 0.0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "truncation s must be >= 0");
  InteractionModel m;
  m.kind_ = InteractionKind::TruncatedHardCore;
  m.radius_ = R;
  m.s_ = s;
  return m;
}

InteractionModel InteractionModel::capped(double M) const {
  if (!(M >= 0.0) || !std::isfinite(M)) throw Error(ErrorCode::InvalidArgument, "cap must be finite and >= 0");
  InteractionModel m = *this;
  m.cap_ = cap_ ? std::min(*cap_, M) : M;
  return m;
}

InteractionModel InteractionModel::shifted(double c) const {
  if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "shift must be finite");
  InteractionModel m = *this;
  m.offset_ += c;
  return m;
}

bool InteractionModel::is_increasing() const { return true; }

std::optional<double> InteractionModel::bound() const {
  std::optional<double> base;
  if (kind_ == InteractionKind::TruncatedHardCore) base = s_;
  if (cap_) base = base ? std::min(*base, *cap_) : *cap_;
  if (!base) return std::nullopt;
  return *base + offset_;
}

std::optional<double> InteractionModel::cardinality_bound(std::size_t b) const {
  const auto bd = static_cast<double>(b);
  std::optional<double> base;
  switch (kind_) {
    case InteractionKind::Strauss:
      base = 0.5 * std::log(1.0 / gamma_) * bd;
      break;
    case InteractionKind::KWise:
      base = c_ * ipow(bd, k_);
      break;
    case InteractionKind::HardCore:
      if (b <= 1) base = 0.0;
      break;
    case InteractionKind::TruncatedHardCore:
      base = b <= 1 ? 0.0 : s_;
      break;
  }
  if (cap_) base = base ? std::min(*base, *cap_) : *cap_;
  if (!base) return std::nullopt;
  return *base + offset_;
}

Energy InteractionModel::local_energy(const LocalView& eta) const {
  Energy e;
  switch (kind_) {
    case InteractionKind::Strauss:
      e.value = 0.5 * std::log(1.0 / gamma_) * static_cast<double>(eta.count());
      break;
    case InteractionKind::KWise:
      e.value = c_ * tuple_count(eta, k_, radius_, phi_);
      break;
    case InteractionKind::HardCore:
      if (count_with_origin(eta) >= 2) e = Energy::infinity();
      break;
    case InteractionKind::TruncatedHardCore:
      e.value = count_with_origin(eta) >= 2 ? s_ : 0.0;
      break;
  }
  if (cap_) {
    if (e.infinite) return {*cap_, false};
    e.value = std::min(e.value, *cap_);
  }
  return e;
}

ScoreModel ScoreModel::neighbor_count(double r) {
  check_radius(r, "score radius r");
  ScoreModel m;
  m.kind_ = ScoreKind::NeighborCount;
  m.radius_ = r;
  return m;
}

ScoreModel ScoreModel::tuple(int k, double r, TuplePotential phi, double c) {
  check_k(k);
  check_radius(r, "score radius r");
  if (!(c >= 0.0) || !std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "tuple weight must be >= 0");
  ScoreModel m;
  m.kind_ = ScoreKind::Tuple;
  m.k_ = k;
  m.radius_ = r;
  m.phi_ = phi;
  m.c_ = c;
  return m;
}

ScoreModel ScoreModel::indicator(double r, int threshold) {
  check_radius(r, "score radius r");
  if (threshold < 1) throw Error(ErrorCode::InvalidArgument, "indicator threshold must be >= 1");
  ScoreModel m;
  m.kind_ = ScoreKind::Indicator;
  m.radius_ = r;
  m.m_ = threshold;
  return m;
}

ScoreModel ScoreModel::constant(double c) {
  if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "constant score must be finite");
  ScoreModel m;
  m.kind_ = ScoreKind::Constant;
  m.c_ = c;
  return m;
}

ScoreModel ScoreModel::capped(double M) const {
  if (!(M >= 0.0) || !std::isfinite(M)) throw Error(ErrorCode::InvalidArgument, "cap must be finite and >= 0");
  ScoreModel m = *this;
  m.cap_ = cap_ ? std::min(*cap_, M) : M;
  return m;
}

bool ScoreModel::is_increasing() const { return true; }

std::optional<double> ScoreModel::bound() const {
  std::optional<double> base;
  if (kind_ == ScoreKind::Indicator) base = 1.0;
  if (kind_ == ScoreKind::Constant) base = std::abs(c_);
  if (cap_) base = base ? std::min(*base, *cap_) : *cap_;
  return base;
}

std::optional<double> ScoreModel::cardinality_bound(std::size_t b) const {
  const auto bd = static_cast<double>(b);
  double base = 0.0;
  switch (kind_) {
    case ScoreKind::NeighborCount:
      base = bd;
      break;
    case ScoreKind::Tuple:
      base = c_ * ipow(bd, k_);
      break;
    case ScoreKind::Indicator:
      base = 1.0;
      break;
    case ScoreKind::Constant:
      base = std::abs(c_);
      break;
  }
  if (cap_) base = std::min(base, *cap_);
  return base;
}

double ScoreModel::evaluate(const LocalView& eta) const {
  double v = 0.0;
  switch (kind_) {
    case ScoreKind::NeighborCount:
      v = static_cast<double>(eta.count());
      break;
    case ScoreKind::Tuple:
      v = c_ * tuple_count(eta, k_, radius_, phi_);
      break;
    case ScoreKind::Indicator:
      v = count_with_origin(eta) >= static_cast<std::size_t>(m_) ? 1.0 : 0.0;
      break;
    case ScoreKind::Constant:
      v = c_;
      break;
  }
  return cap_ ? std::min(v, *cap_) : v;
}

BoundaryCondition::BoundaryCondition(const TorusWindow& window, const std::vector<Point>& points, double width)
    : window_(window), width_(width) {
  if (!(width >= 0.0)) throw Error(ErrorCode::InvalidArgument, "annulus width must be >= 0");
  const double h = window.half_side();
  const auto d = static_cast<std::size_t>(window.dim());
  for (const auto& p : points) {
    if (p.size() != d) throw Error(ErrorCode::InvalidArgument, "boundary point dimension mismatch");
    if (window.contains(p)) continue;
    const bool near = std::all_of(p.begin(), p.end(), [&](double v) { return v >= -h - width && v <= h + width; });
    if (near) coords_.insert(coords_.end(), p.begin(), p.end());
  }
}

void validate_spec(const HamiltonianSpec& spec, const InteractionModel& V) {
  if (spec.convention == Convention::Periodic) return;
  if (!spec.bc) throw Error(ErrorCode::MissingBoundaryCondition, "boundary convention needs a boundary condition");
  if (V.is_hard_core()) {
    throw Error(ErrorCode::UnsupportedBoundaryModel, "boundary Hamiltonians are not defined for hard-core V");
  }
  if (V.offset() != 0.0) {
    throw Error(ErrorCode::UnsupportedBoundaryModel, "boundary Hamiltonians require V({0}) = 0 (no offset)");
  }
  if (spec.bc->width() < V.radius()) {
    throw Error(ErrorCode::InvalidArgument, "boundary annulus narrower than the interaction radius");
  }
}

}  // namespace gibbs
