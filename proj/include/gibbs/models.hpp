#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbs/cell_index.hpp"

namespace gibbs {

/// Extended real energy: a finite value or +infinity.
struct Energy {
  double value = 0.0;
  bool infinite = false;

  static Energy infinity() { return {0.0, true}; }
  Energy& operator+=(const Energy& other);
  friend Energy operator+(Energy a, const Energy& b) { return a += b; }
  /// exp(-beta * H); exactly 0 for +infinity.
  double weight(double beta = 1.0) const;
  /// Value with +infinity mapped to HUGE_VAL, for reporting only.
  double as_double() const;
  friend bool operator==(const Energy&, const Energy&) = default;
};

/// A translated local configuration eta = omega - x, restricted to a ball.
/// `others` holds displacements of the points other than the origin.
struct LocalView {
  int dim = 2;
  bool has_origin = true;
  std::vector<double> others;

  std::size_t count() const { return others.size() / static_cast<std::size_t>(dim); }
  std::span<const double> point(std::size_t k) const {
    const auto d = static_cast<std::size_t>(dim);
    return {others.data() + k * d, d};
  }
};

/// Collects every indexed point within `radius` of `center`, skipping `self`.
LocalView gather_view(const CellIndex& index, std::span<const double> center, double radius,
                      std::optional<std::size_t> self);

enum class TuplePotential { Constant, Clique };

enum class InteractionKind { Strauss, KWise, HardCore, TruncatedHardCore };

std::string to_string(InteractionKind kind);

/// Interaction function V. Energies returned by `local_energy` exclude the
/// additive offset, which only enters totals (n * offset).
class InteractionModel {
 public:
  static InteractionModel strauss(double gamma, double r);
  static InteractionModel kwise(int k, double r, TuplePotential phi, double c);
  static InteractionModel hard_core(double R);
  static InteractionModel truncated_hard_core(double R, double s);

  /// min(V, M).
  InteractionModel capped(double M) const;
  /// V + c.
  InteractionModel shifted(double c) const;

  InteractionKind kind() const { return kind_; }
  double radius() const { return radius_; }
  double gamma() const { return gamma_; }
  int k() const { return k_; }
  TuplePotential potential() const { return phi_; }
  double phi_bound() const { return c_; }
  double truncation() const { return s_; }
  std::optional<double> cap() const { return cap_; }
  double offset() const { return offset_; }

  bool is_hard_core() const { return kind_ == InteractionKind::HardCore && !cap_; }
  bool is_increasing() const;
  /// Uniform bound c on V if one exists.
  std::optional<double> bound() const;
  /// M_b: bound on V over configurations with at most b points in the ball.
  std::optional<double> cardinality_bound(std::size_t b) const;
  /// Pair-count form 0.5*log(1/gamma)*count, eligible for O(1) move deltas.
  bool is_plain_strauss() const { return kind_ == InteractionKind::Strauss && !cap_; }

  Energy local_energy(const LocalView& eta) const;

 private:
  InteractionModel() = default;

  InteractionKind kind_ = InteractionKind::Strauss;
  double radius_ = 0.0;
  double gamma_ = 1.0;
  int k_ = 2;
  TuplePotential phi_ = TuplePotential::Constant;
  double c_ = 0.0;
  double s_ = 0.0;
  std::optional<double> cap_;
  double offset_ = 0.0;
};

enum class ScoreKind { NeighborCount, Tuple, Indicator, Constant };

/// Score function xi.
class ScoreModel {
 public:
  static ScoreModel neighbor_count(double r);
  static ScoreModel tuple(int k, double r, TuplePotential phi, double c);
  /// 1[eta(b_r) >= m], origin included in the count.
  static ScoreModel indicator(double r, int m);
  static ScoreModel constant(double c);

  ScoreModel capped(double M) const;

  ScoreKind kind() const { return kind_; }
  double radius() const { return radius_; }
  bool is_increasing() const;
  std::optional<double> bound() const;
  std::optional<double> cardinality_bound(std::size_t b) const;

  double evaluate(const LocalView& eta) const;

 private:
  ScoreModel() = default;

  ScoreKind kind_ = ScoreKind::Constant;
  double radius_ = 0.0;
  int k_ = 2;
  int m_ = 2;
  TuplePotential phi_ = TuplePotential::Constant;
  double c_ = 0.0;
  std::optional<double> cap_;
};

/// Boundary points gamma restricted to W^c and to an annulus of the given
/// width around W; farther points never interact with the window.
class BoundaryCondition {
 public:
  BoundaryCondition(const TorusWindow& window, const std::vector<Point>& points, double width);

  const TorusWindow& window() const { return window_; }
  double width() const { return width_; }
  std::size_t size() const { return coords_.size() / static_cast<std::size_t>(window_.dim()); }
  std::span<const double> coords() const { return coords_; }
  std::span<const double> point(std::size_t id) const {
    const auto d = static_cast<std::size_t>(window_.dim());
    return {coords_.data() + id * d, d};
  }

 private:
  TorusWindow window_;
  double width_;
  std::vector<double> coords_;
};

enum class Convention { Periodic, Boundary1, Boundary2 };

struct HamiltonianSpec {
  Convention convention = Convention::Periodic;
  std::optional<BoundaryCondition> bc;

  static HamiltonianSpec periodic() { return {}; }
  static HamiltonianSpec boundary1(BoundaryCondition bc) { return {Convention::Boundary1, std::move(bc)}; }
  static HamiltonianSpec boundary2(BoundaryCondition bc) { return {Convention::Boundary2, std::move(bc)}; }
};

/// Rejects model/convention combinations outside the boundary theory
/// (hard-core V, V({0}) != 0) and a missing boundary condition.
void validate_spec(const HamiltonianSpec& spec, const InteractionModel& V);

}  // namespace gibbs
