#pragma once

#include <map>
#include <string>
#include <vector>

#include "hjump/orchestrator.hpp"

namespace hjump {

/// Absolute slack for floating-point accumulation over a run. All other
/// tolerances are explicit functions of h, L and record_every.
inline constexpr double kRoundoff = 1e-10;

struct CheckReport {
  std::string name;
  bool pass = true;
  std::map<std::string, double> measured;
  std::map<std::string, double> tolerance;
  std::string fingerprint;
  std::string note;
};

/// Max over [u - v]_+ taken side by side (a.e.), compared with its t = 0
/// value plus 4 h L. Also reports the ordered case u0 <= v0 => u <= v.
CheckReport check_comparison(const Solution& u, const Solution& v);

/// u0 + k t - 2hL <= u <= u0 + K t + 2hL at every recorded node.
CheckReport check_sandwich(const Solution& sol);

/// Difference quotients between consecutive records lie in
/// [k - tol_r, K + tol_r], tol_r = 2 h L / record_every.
CheckReport check_time_lipschitz(const Solution& sol);

struct JumpLawTolerances {
  double decay = 0.02;
  double tau = 0.02;
};

/// max over t0 < t1 < tau of J(t1) - J(t0) + A (t1 - t0), clipped at 0.
double jump_decay_violation(const JumpRecord& rec);

CheckReport check_jump_laws(const Solution& sol, JumpLawTolerances tol = {});

enum class Side { Left, Right };

/// Adds `bump` on `side` of jump `jump` and requires the other side to be
/// bit-identical before the earlier of the two collapse times.
CheckReport check_barrier(const Scenario& s, Side side, std::size_t jump, const Bump& bump);

/// Adds `bump` outside [c, d] and compares both runs inside the shrinking
/// trapezoid c + L t < x < d - L t.
CheckReport check_cone(const Scenario& s, const Bump& bump, double c, double d);

struct ConvergenceRow {
  double h = 0.0;
  double sup_diff = 0.0;    // vs the next finer level, away from jumps
  double l1_diff = 0.0;
  double trace_diff = 0.0;  // max over jumps and records
  double tau_diff = 0.0;    // max over jumps
  std::vector<double> tau;  // per jump, this level
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;  // coarse to fine; last row has no diffs
  CheckReport report;
};

/// Self-convergence over h, h/2, ..., h/2^(levels-1). Requires rate >= 0.8
/// for jump-free data (sup and L1), >= 0.4 for traces and tau otherwise.
ConvergenceStudy convergence_study(const Scenario& s, int levels);

/// Same scenario twice must be bit-identical; the L1 distance between
/// successive refinements must shrink.
CheckReport check_determinism(const Scenario& s);

/// log2(e_coarse / e_fine) with exact-zero handling: both below kRoundoff
/// counts as converged (+inf).
double convergence_rate(double e_coarse, double e_fine);

}  // namespace hjump
