#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "hjump/orchestrator.hpp"
#include "hjump/verify.hpp"

namespace hjump {

enum class CLBoundary { Transmissive, Periodic };

/// Cell averages v_{i+1/2} on the cells between consecutive nodes of a
/// uniform grid; cell i spans [x_i, x_{i+1}].
struct CLState {
  double a = 0.0;
  double h = 1.0;
  std::vector<double> values;
  double t = 0.0;
  CLBoundary bc = CLBoundary::Transmissive;

  double center(std::size_t i) const { return a + h * (static_cast<double>(i) + 0.5); }
  double mass() const;
};

/// 1/2 (H(vl) + H(vr)) - alpha/2 (vr - vl)
double rusanov_flux(double vl, double vr, const HamiltonianSpec& H, double alpha);

/// Conservative forward-Euler step. ConfigError when alpha < ||H'|| or when
/// dt alpha / h > 1.
CLState rusanov_step(const CLState& s, double dt, const HamiltonianSpec& H, double alpha);

/// v_{i+1/2} = (u0(x_{i+1}) - u0(x_i)) / h on the solution grid. Rejects
/// data with jumps.
CLState cl_initial_state(const PiecewiseFn& u0, const Geometry& g,
                         CLBoundary bc = CLBoundary::Transmissive);

/// States at t0, every record time, and t1.
std::vector<CLState> solve_cl(const CLState& initial, double t1, const HamiltonianSpec& H,
                              double alpha, double cfl, double record_every);

/// Dual run matching the grid, step size and record times of `sol`.
std::vector<CLState> dual_run(const Scenario& s, const Solution& sol,
                              CLBoundary bc = CLBoundary::Transmissive);

struct DualOptions {
  double tol = 0.05;
  // Cells entirely inside [lo, hi] enter the distance.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

/// L1 distance between (u_{i+1} - u_i)/h and v_{i+1/2}, maxed over records.
double dual_distance(const Solution& sol, const std::vector<CLState>& cl, DualOptions opt = {});

/// InputError for jumped data or mismatched grids/records.
CheckReport cross_check(const Solution& sol, const std::vector<CLState>& cl,
                        DualOptions opt = {});

}  // namespace hjump
