#pragma once

#include <cstddef>
#include <vector>

#include "hjump/hamiltonian.hpp"

namespace hjump {

/// Lower bound on the dissipation speed used by cfl_dt. With a constant
/// Hamiltonian the update is an exact translation in value and any step is
/// stable, so the floor only keeps dt finite.
inline constexpr double kAlphaFloor = 1e-12;

struct BCTag {
  enum class Kind { SingularPlus, SingularMinus, Free, TrapezoidEdge };

  Kind kind = Kind::Free;
  double slope_rate = 0.0;  // edge speed, TrapezoidEdge only

  static BCTag singular_plus() { return {Kind::SingularPlus, 0.0}; }
  static BCTag singular_minus() { return {Kind::SingularMinus, 0.0}; }
  static BCTag free() { return {Kind::Free, 0.0}; }
  static BCTag trapezoid_edge(double rate) { return {Kind::TrapezoidEdge, rate}; }

  bool is_singular() const { return kind == Kind::SingularPlus || kind == Kind::SingularMinus; }
  friend bool operator==(const BCTag&, const BCTag&) = default;
};

const char* to_string(BCTag::Kind kind);

struct IntervalGrid {
  double a = 0.0;
  double b = 1.0;
  double h = 0.5;
  std::size_t n = 3;
  BCTag bc_left;
  BCTag bc_right;

  /// h = (b - a) / (n - 1); requires n >= 3.
  static IntervalGrid make(double a, double b, std::size_t n, BCTag left, BCTag right);

  double x(std::size_t i) const { return a + h * static_cast<double>(i); }
};

struct IntervalState {
  IntervalGrid grid;
  std::vector<double> values;
  double t = 0.0;

  /// Node range [first, last] not yet swept out by trapezoid edges at time t.
  std::pair<std::size_t, std::size_t> active_range() const;
  bool is_active(std::size_t i) const;
};

/// Local Lax-Friedrichs flux H((p- + p+)/2) - alpha/2 (p+ - p-).
/// Throws ConfigError when alpha < ||H'||_inf.
double numerical_hamiltonian(double p_minus, double p_plus, const HamiltonianSpec& H,
                             double alpha);

double cfl_dt(double h, double alpha, double cfl);

/// One forward-Euler step of the monotone scheme, with the boundary nodes
/// driven by their BC tags.
IntervalState step_interval(const IntervalState& s, double dt, const HamiltonianSpec& H,
                            double alpha);

struct TracePoint {
  double t = 0.0;
  double left = 0.0;
  double right = 0.0;
};

struct IntervalTrajectory {
  std::vector<IntervalState> snapshots;  // at t0, t0 + m*record_every, t1
  std::vector<TracePoint> traces;        // every step, including t0
};

/// Steps `initial` from its time to t1, landing exactly on every record time.
IntervalTrajectory solve_interval(const IntervalState& initial, double t1,
                                  const HamiltonianSpec& H, double alpha, double cfl,
                                  double record_every);

}  // namespace hjump
