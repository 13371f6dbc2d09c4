#include "hjump/dual_cl.hpp"

#include <cmath>
#include <sstream>

#include "hjump/error.hpp"
#include "hjump/time_clock.hpp"

namespace hjump {

double CLState::mass() const {
  double m = 0.0;
  for (double v : values) m += v * h;
  return m;
}

double rusanov_flux(double vl, double vr, const HamiltonianSpec& H, double alpha) {
  return 0.5 * (eval(H, vl) + eval(H, vr)) - 0.5 * alpha * (vr - vl);
}

CLState rusanov_step(const CLState& s, double dt, const HamiltonianSpec& H, double alpha) {
  if (alpha < H.lipschitz()) {
    std::ostringstream msg;
    msg << "rusanov_step: alpha=" << alpha << " is below ||H'||=" << H.lipschitz();
    throw ConfigError(msg.str());
  }
  if (!(dt > 0.0)) throw ConfigError("rusanov_step: dt must be positive");
  if (dt * alpha > s.h * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "rusanov_step: dt=" << dt << " violates dt*alpha/h <= 1 (h=" << s.h
        << ", alpha=" << alpha << ")";
    throw ConfigError(msg.str());
  }
  const std::size_t n = s.values.size();
  if (n < 2) throw InputError("rusanov_step: need at least 2 cells");
  const auto& v = s.values;

  // flux[i] sits on the left face of cell i; flux[n] on the right face of the last cell
  std::vector<double> flux(n + 1);
  for (std::size_t i = 1; i < n; ++i) flux[i] = rusanov_flux(v[i - 1], v[i], H, alpha);
  if (s.bc == CLBoundary::Periodic) {
    flux[0] = rusanov_flux(v[n - 1], v[0], H, alpha);
    flux[n] = flux[0];
  } else {
    flux[0] = rusanov_flux(v[0], v[0], H, alpha);
    flux[n] = rusanov_flux(v[n - 1], v[n - 1], H, alpha);
  }

  CLState next = s;
  next.t = s.t + dt;
  const double r = dt / s.h;
  for (std::size_t i = 0; i < n; ++i) {
    next.values[i] = v[i] - r * (flux[i + 1] - flux[i]);
    if (!std::isfinite(next.values[i])) {
      std::ostringstream msg;
      msg << "rusanov_step: non-finite value in cell " << i << " at t=" << next.t;
      throw NumericalError(msg.str());
    }
  }
  return next;
}

CLState cl_initial_state(const PiecewiseFn& u0, const Geometry& g, CLBoundary bc) {
  if (!u0.breakpoints().empty())
    throw InputError("dual conservation law: initial data with jumps is not supported");
  CLState s;
  s.a = g.a;
  s.h = g.h;
  s.bc = bc;
  s.values.resize(g.n_nodes - 1);
  for (std::size_t i = 0; i + 1 < g.n_nodes; ++i)
    s.values[i] = (u0.piece_value(0, g.x(i + 1)) - u0.piece_value(0, g.x(i))) / g.h;
  return s;
}

std::vector<CLState> solve_cl(const CLState& initial, double t1, const HamiltonianSpec& H,
                              double alpha, double cfl, double record_every) {
  if (!(t1 > initial.t)) throw InputError("solve_cl: need t1 > t0");
  std::vector<CLState> out{initial};
  const double dt_max = cfl_dt(initial.h, alpha, cfl);
  RecordClock clock(initial.t, t1, record_every);
  CLState cur = initial;
  while (!clock.done()) {
    const auto step = clock.next_step(dt_max);
    cur = rusanov_step(cur, step.dt, H, alpha);
    cur.t = step.t_after;
    if (step.lands_on_record) out.push_back(cur);
  }
  return out;
}

std::vector<CLState> dual_run(const Scenario& s, const Solution& sol, CLBoundary bc) {
  const auto init = cl_initial_state(s.u0, sol.geometry, bc);
  return solve_cl(init, s.T, s.H, sol.alpha, s.numerics.cfl, sol.record_every);
}

double dual_distance(const Solution& sol, const std::vector<CLState>& cl, DualOptions opt) {
  if (!sol.jumps.empty())
    throw InputError("cross_check: scenario has jumps; the dual correspondence needs continuous data");
  const auto& g = sol.geometry;
  if (cl.size() != sol.snapshots.size())
    throw InputError("cross_check: record counts differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < cl.size(); ++k) {
    const auto& v = cl[k];
    if (v.values.size() + 1 != g.n_nodes || v.a != g.a || v.h != g.h)
      throw InputError("cross_check: grid mismatch between HJ and conservation-law runs");
    if (v.t != sol.snapshots[k].t) throw InputError("cross_check: record times differ");
    const auto u = sol.field(k);
    double l1 = 0.0;
    for (std::size_t i = 0; i < v.values.size(); ++i) {
      if (g.x(i) < opt.lo || g.x(i + 1) > opt.hi) continue;
      const double ux = (u.plus[i + 1] - u.plus[i]) / g.h;
      l1 += std::abs(ux - v.values[i]) * g.h;
    }
    worst = std::max(worst, l1);
  }
  return worst;
}

CheckReport cross_check(const Solution& sol, const std::vector<CLState>& cl, DualOptions opt) {
  CheckReport r;
  r.name = "dual_cross_check";
  r.fingerprint = sol.fingerprint;
  r.measured["l1_distance"] = dual_distance(sol, cl, opt);
  r.tolerance["l1_distance"] = opt.tol;
  r.measured["mass_drift"] = std::abs(cl.back().mass() - cl.front().mass());
  r.pass = r.measured["l1_distance"] <= opt.tol;
  r.note = "L1 of du/dx against v over matched records; mass drift is informational";
  return r;
}

}  // namespace hjump
