#include "hjump/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjump/error.hpp"
#include "hjump/time_clock.hpp"

namespace hjump {

const char* to_string(BCTag::Kind kind) {
  switch (kind) {
    case BCTag::Kind::SingularPlus: return "singular_plus";
    case BCTag::Kind::SingularMinus: return "singular_minus";
    case BCTag::Kind::Free: return "free";
    case BCTag::Kind::TrapezoidEdge: return "trapezoid_edge";
  }
  return "unknown";
}

IntervalGrid IntervalGrid::make(double a, double b, std::size_t n, BCTag left, BCTag right) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw InputError("IntervalGrid: need finite a < b");
  if (n < 3) throw InputError("IntervalGrid: need at least 3 nodes");
  IntervalGrid g;
  g.a = a;
  g.b = b;
  g.n = n;
  g.h = (b - a) / static_cast<double>(n - 1);
  g.bc_left = left;
  g.bc_right = right;
  return g;
}

std::pair<std::size_t, std::size_t> IntervalState::active_range() const {
  std::size_t first = 0;
  std::size_t last = grid.n - 1;
  const double eps = 1e-9 * grid.h;
  if (grid.bc_left.kind == BCTag::Kind::TrapezoidEdge) {
    const double edge = grid.a + grid.bc_left.slope_rate * t;
    while (first < grid.n - 1 && grid.x(first) < edge - eps) ++first;
  }
  if (grid.bc_right.kind == BCTag::Kind::TrapezoidEdge) {
    const double edge = grid.b - grid.bc_right.slope_rate * t;
    while (last > 0 && grid.x(last) > edge + eps) --last;
  }
  return {first, last};
}

bool IntervalState::is_active(std::size_t i) const {
  const auto [first, last] = active_range();
  return i >= first && i <= last;
}

double numerical_hamiltonian(double p_minus, double p_plus, const HamiltonianSpec& H,
                             double alpha) {
  if (alpha < H.lipschitz()) {
    std::ostringstream msg;
    msg << "numerical_hamiltonian: alpha=" << alpha << " is below ||H'||=" << H.lipschitz()
        << "; the flux would not be monotone";
    throw ConfigError(msg.str());
  }
  return eval(H, 0.5 * (p_minus + p_plus)) - 0.5 * alpha * (p_plus - p_minus);
}

double cfl_dt(double h, double alpha, double cfl) {
  if (!(h > 0.0)) throw ConfigError("cfl_dt: h must be positive");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl_dt: cfl must lie in (0, 1]");
  if (!(alpha >= 0.0)) throw ConfigError("cfl_dt: alpha must be non-negative");
  return cfl * h / std::max(alpha, kAlphaFloor);
}

namespace {

double boundary_rate(const BCTag& tag, Endpoint end, double p_in, const HamiltonianSpec& H) {
  switch (tag.kind) {
    case BCTag::Kind::SingularPlus:
      return boundary_hamiltonian(end, SingularSign::Plus, p_in, H);
    case BCTag::Kind::SingularMinus:
      return boundary_hamiltonian(end, SingularSign::Minus, p_in, H);
    case BCTag::Kind::Free:
    case BCTag::Kind::TrapezoidEdge:
      return eval(H, p_in);
  }
  return eval(H, p_in);
}

}  // namespace

IntervalState step_interval(const IntervalState& s, double dt, const HamiltonianSpec& H,
                            double alpha) {
  const auto& g = s.grid;
  if (alpha < H.lipschitz()) {
    std::ostringstream msg;
    msg << "step_interval: alpha=" << alpha << " is below ||H'||=" << H.lipschitz();
    throw ConfigError(msg.str());
  }
  if (!(dt > 0.0)) throw ConfigError("step_interval: dt must be positive");
  if (dt > cfl_dt(g.h, alpha, 1.0) * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "step_interval: dt=" << dt << " violates the CFL bound h/alpha=" << g.h / alpha;
    throw ConfigError(msg.str());
  }
  if (s.values.size() != g.n) throw ConsistencyError("step_interval: value count != node count");

  IntervalState next = s;
  next.t = s.t + dt;
  const auto [first, last] = s.active_range();
  if (last <= first) return next;

  const double inv_h = 1.0 / g.h;
  const auto& u = s.values;
  auto& out = next.values;
  double p_left = (u[first + 1] - u[first]) * inv_h;
  out[first] = u[first] - dt * boundary_rate(g.bc_left, Endpoint::Left, p_left, H);
  for (std::size_t i = first + 1; i < last; ++i) {
    const double p_right = (u[i + 1] - u[i]) * inv_h;
    out[i] = u[i] - dt * (eval(H, 0.5 * (p_left + p_right)) - 0.5 * alpha * (p_right - p_left));
    p_left = p_right;
  }
  out[last] = u[last] - dt * boundary_rate(g.bc_right, Endpoint::Right, p_left, H);

  for (std::size_t i = first; i <= last; ++i) {
    if (!std::isfinite(out[i])) {
      std::ostringstream msg;
      msg << "step_interval: non-finite value at node " << i << " (x=" << g.x(i)
          << ") at t=" << next.t << "; previous value " << u[i];
      throw NumericalError(msg.str());
    }
  }
  return next;
}

IntervalTrajectory solve_interval(const IntervalState& initial, double t1,
                                  const HamiltonianSpec& H, double alpha, double cfl,
                                  double record_every) {
  if (!(t1 > initial.t)) throw InputError("solve_interval: need t1 > t0");
  const double dt_max = cfl_dt(initial.grid.h, alpha, cfl);
  RecordClock clock(initial.t, t1, record_every);

  IntervalTrajectory traj;
  IntervalState state = initial;
  traj.snapshots.push_back(state);
  traj.traces.push_back({state.t, state.values.front(), state.values.back()});
  while (!clock.done()) {
    const auto step = clock.next_step(dt_max);
    state = step_interval(state, step.dt, H, alpha);
    state.t = step.t_after;
    traj.traces.push_back({state.t, state.values.front(), state.values.back()});
    if (step.lands_on_record) traj.snapshots.push_back(state);
  }
  return traj;
}

}  // namespace hjump
