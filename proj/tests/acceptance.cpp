// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "hjump/dual_cl.hpp"
#include "hjump/envelope.hpp"
#include "hjump/error.hpp"
#include "hjump/orchestrator.hpp"
#include "hjump/scenario_io.hpp"
#include "hjump/verify.hpp"

using namespace hjump;

namespace {

const std::string kFixtures = HJUMP_FIXTURES;
constexpr double kH = 1e-3;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Detail {
  std::ostringstream os;
  bool pass = true;

  // records a measurement against an upper bound
  void le(const std::string& what, double value, double bound) {
    const bool ok = value <= bound;
    pass = pass && ok;
    os << ' ' << what << '=' << format_double(value) << (ok ? "<=" : " > ") << format_double(bound);
  }
  void ge(const std::string& what, double value, double bound) {
    const bool ok = value >= bound;
    pass = pass && ok;
    os << ' ' << what << '=' << format_double(value) << (ok ? ">=" : " < ") << format_double(bound);
  }
  void flag(const std::string& what, bool ok) {
    pass = pass && ok;
    os << ' ' << what << (ok ? "=ok" : "=FAILED");
  }
  Outcome done() const { return {pass, os.str()}; }
};

Segment affine(double m, double c) { return {AffineSegment{m, c}, {}}; }
Segment constant(double v) { return {ConstantSegment{v}, {}}; }

HamiltonianSpec pick_h(int i) {
  switch (i % 3) {
    case 0: return HamiltonianSpec::sine();
    case 1: return HamiltonianSpec::tanh();
    default: return HamiltonianSpec::clamp();
  }
}

BCTag pick_bc(std::mt19937_64& rng, bool singular_only) {
  std::uniform_int_distribution<int> d(singular_only ? 1 : 0, 2);
  switch (d(rng)) {
    case 0: return BCTag::free();
    case 1: return BCTag::singular_plus();
    default: return BCTag::singular_minus();
  }
}

// Random piecewise-affine data on [-2, 2] with 1-3 grid-aligned jumps.
Scenario random_scenario(std::mt19937_64& rng, int index, bool singular_outer) {
  std::uniform_int_distribution<int> nj(1, 3);
  std::uniform_int_distribution<int> tenth(-15, 15);
  std::uniform_real_distribution<double> slope(-1.5, 1.5), level(-1.0, 1.0), mag(0.2, 1.5);
  std::bernoulli_distribution up(0.5);
  const int jumps = nj(rng);
  std::vector<int> ks;
  while (static_cast<int>(ks.size()) < jumps) {
    const int k = tenth(rng);
    bool ok = true;
    for (int o : ks) ok = ok && std::abs(o - k) >= 3;
    if (ok) ks.push_back(k);
  }
  std::sort(ks.begin(), ks.end());
  std::vector<double> bps;
  for (int k : ks) bps.push_back(k / 10.0);

  std::vector<Segment> segs;
  double m = slope(rng), c = level(rng);
  segs.push_back(affine(m, c));
  for (double x : bps) {
    const double left = m * x + c;
    const double right = left + (up(rng) ? 1.0 : -1.0) * mag(rng);
    m = slope(rng);
    c = right - m * x;
    segs.push_back(affine(m, c));
  }
  Scenario s;
  s.name = "random_" + std::to_string(index);
  s.a = -2.0;
  s.b = 2.0;
  s.T = std::array{0.5, 0.75, 1.0}[index % 3];
  s.H = pick_h(index);
  s.u0 = PiecewiseFn(-2.0, 2.0, bps, segs);
  s.left_bc = pick_bc(rng, singular_outer);
  s.right_bc = pick_bc(rng, singular_outer);
  s.numerics.h = kH;
  return s;
}

struct Suite {
  std::vector<Scenario> scenarios;
  std::vector<Solution> solutions;
};

const Suite& random_suite() {
  static const Suite suite = [] {
    Suite s;
    std::mt19937_64 rng(20240917);
    for (int i = 0; i < 24; ++i) {
      s.scenarios.push_back(random_scenario(rng, i, false));
      s.solutions.push_back(run(s.scenarios.back()));
    }
    return s;
  }();
  return suite;
}

// ---------------------------------------------------------------------------

Outcome affine_exactness() {
  const auto s = load_scenario(kFixtures + "/affine.json");
  const auto sol = run(s);
  double err = 0.0;
  for (std::size_t k = 0; k < sol.snapshots.size(); ++k) {
    const double t = sol.snapshots[k].t;
    const auto f = sol.field(k);
    for (std::size_t i = 0; i < f.minus.size(); ++i) {
      const double x = sol.geometry.x(i);
      err = std::max(err, std::abs(f.minus[i] - (2 * x + 1 - std::sin(2.0) * t)));
    }
  }
  Detail d;
  d.le("max_err", err, 1e-10);
  return d.done();
}

Outcome constants() {
  Detail d;
  auto exact = [&](const char* name, const HamiltonianSpec& H, double K, double k, double Ap, double Am) {
    const auto b = compute_bounds(H);
    d.flag(name, b.K == K && b.k == k && b.A_plus == Ap && b.A_minus == Am);
  };
  exact("sin", HamiltonianSpec::sine(), 1, -1, 2, 2);
  exact("tanh", HamiltonianSpec::tanh(), 1, -1, 0, 0);
  for (double c : {-2.0, 0.0, 0.3, 1.75}) exact("constant", HamiltonianSpec::constant(c), -c, -c, 0, 0);
  return d.done();
}

// tau measured at h and h/2, Richardson-extrapolated as 2 tau_{h/2} - tau_h
double richardson_tau(const Scenario& s) {
  auto half = s;
  half.numerics.h = s.numerics.h / 2;
  const double t1 = run(s).jumps[0].tau.value_or(NAN);
  const double t2 = run(half).jumps[0].tau.value_or(NAN);
  return 2 * t2 - t1;
}

Outcome sharp_sin() {
  const auto s = load_scenario(kFixtures + "/riemann_sin.json");
  const auto sol = run(s);
  const auto& rec = sol.jumps[0];
  double el = 0.0, er = 0.0;
  for (const auto& p : rec.series) {
    if (p.t > 0.4) break;
    el = std::max(el, std::abs(p.left - p.t));
    er = std::max(er, std::abs(p.right - (1.0 - p.t)));
  }
  Detail d;
  const double tau = rec.tau.value_or(NAN);
  d.ge("tau", tau, 0.45);
  d.le("tau", tau, 0.55);
  d.le("left_err", el, 0.02);
  d.le("right_err", er, 0.02);
  d.le("|tau_richardson-0.5|", std::abs(richardson_tau(s) - 0.5), 0.05);
  return d.done();
}

Outcome sharp_tanh() {
  const auto s = load_scenario(kFixtures + "/riemann_tanh.json");
  const auto sol = run(s);
  const auto& rec = sol.jumps[0];
  double el = 0.0, er = 0.0;
  for (const auto& p : rec.series) {
    if (rec.tau && p.t >= *rec.tau) break;
    el = std::max(el, std::abs(p.left));
    er = std::max(er, std::abs(p.right - (1.0 - p.t)));
  }
  Detail d;
  const double tau = rec.tau.value_or(NAN);
  d.ge("tau", tau, 0.93);
  d.le("tau", tau, 1.07);
  d.le("left_err", el, 1e-3);
  d.le("right_err", er, 0.02);
  d.le("|tau_richardson-1|", std::abs(richardson_tau(s) - 1.0), 0.07);
  return d.done();
}

Outcome persistence() {
  const auto& suite = random_suite();
  double worst = 0.0;
  std::size_t jumps = 0, collapsed = 0;
  for (const auto& sol : suite.solutions) {
    for (const auto& rec : sol.jumps) {
      ++jumps;
      if (!rec.tau) continue;
      ++collapsed;
      worst = std::max(worst, rec.t_lower - *rec.tau);
    }
  }
  Detail d;
  d.ge("scenarios", static_cast<double>(suite.solutions.size()), 20);
  d.os << " jumps=" << jumps << " collapsed=" << collapsed;
  d.le("max(t_lower-tau)", worst, 0.02);
  return d.done();
}

Outcome decay_law() {
  double worst = 0.0;
  for (const auto& sol : random_suite().solutions)
    for (const auto& rec : sol.jumps) worst = std::max(worst, jump_decay_violation(rec));
  Detail d;
  d.le("max_violation", worst, 0.02);
  return d.done();
}

Outcome sign_and_monotonicity() {
  double flip = 0.0, increase = 0.0, ratio = 0.0;
  for (const auto& sol : random_suite().solutions) {
    for (const auto& rec : sol.jumps) {
      for (std::size_t i = 0; i < rec.series.size(); ++i) {
        const auto& p = rec.series[i];
        if (rec.tau && p.t >= *rec.tau) break;
        const double g = rec.sign == JumpSign::Up ? p.right - p.left : p.left - p.right;
        flip = std::max(flip, -g);
        if (i > 0) {
          const double inc = p.J - rec.series[i - 1].J;
          increase = std::max(increase, inc);
          ratio = std::max(ratio, inc / sol.tol_J);
        }
      }
    }
  }
  Detail d;
  d.le("max_sign_flip", flip, 0.0);
  d.le("max_J_increase/tol_J", ratio, 1.0);
  d.os << " (max_J_increase=" << format_double(increase) << ")";
  return d.done();
}

Outcome comparison() {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> off(0.0, 0.5), amp(0.0, 0.6), ctr(-1.8, 1.8);
  double worst_excess = 0.0, worst_ordered = 0.0, tol = 0.0;
  int pairs = 0;
  for (int i = 0; i < 20; ++i) {
    const Scenario u = random_scenario(rng, 100 + i, true);
    // v0 >= u0: nonnegative offset per piece plus a nonnegative tent
    std::vector<Segment> segs = u.u0.segments();
    for (auto& sg : segs) std::get<AffineSegment>(sg.form).intercept += off(rng);
    Scenario v = u;
    v.u0 = PiecewiseFn(u.a, u.b, u.u0.breakpoints(), segs).with_bump({ctr(rng), 0.3, amp(rng)});
    const auto su = run(u);
    const auto sv = run(v);
    const auto r = check_comparison(su, sv);
    tol = 4 * su.geometry.h * su.bounds.L + kRoundoff;
    worst_excess = std::max(worst_excess, r.measured.at("excess_over_initial"));
    worst_ordered = std::max(worst_ordered, r.measured.at("max_positive_part"));
    ++pairs;
  }
  Detail d;
  d.os << " pairs=" << pairs;
  d.le("max_excess", worst_excess, tol);
  d.le("max[u-v]+", worst_ordered, tol);
  return d.done();
}

Outcome sandwich() {
  const auto& suite = random_suite();
  double above = 0.0, below = 0.0, tol = 0.0;
  std::string failing;
  for (std::size_t i = 0; i < suite.solutions.size(); ++i) {
    const auto r = check_sandwich(suite.solutions[i]);
    tol = r.tolerance.at("max_above_supersolution");
    above = std::max(above, r.measured.at("max_above_supersolution"));
    below = std::max(below, r.measured.at("max_below_subsolution"));
    if (!r.pass) failing += " " + suite.scenarios[i].name;
  }
  Detail d;
  d.le("max_above", above, tol);
  d.le("max_below", below, tol);
  if (!failing.empty()) d.os << " failing:" << failing;
  return d.done();
}

Outcome time_lipschitz() {
  double excess = 0.0, deficit = 0.0, tol = 0.0;
  for (const auto& sol : random_suite().solutions) {
    const auto r = check_time_lipschitz(sol);
    tol = r.tolerance.at("excess_above_K");
    excess = std::max(excess, r.measured.at("excess_above_K"));
    deficit = std::max(deficit, r.measured.at("deficit_below_k"));
  }
  Detail d;
  d.le("max_excess_above_K", excess, tol);
  d.le("max_deficit_below_k", deficit, tol);
  return d.done();
}

Outcome barrier() {
  const auto s = load_scenario(kFixtures + "/riemann_tanh.json");
  const auto r = check_barrier(s, Side::Right, 0, Bump{1.0, 0.6, 0.4});
  const auto r2 = check_barrier(s, Side::Right, 0, Bump{0.5, 0.5, -0.3});
  Detail d;
  d.le("max_abs_difference", std::max(r.measured.at("max_abs_difference"), r2.measured.at("max_abs_difference")), 0.0);
  d.os << " records=" << r.measured.at("records_compared")
       << " cutoff=" << format_double(r.measured.at("cutoff_time"));
  return d.done();
}

Outcome cone() {
  const auto s = load_scenario(kFixtures + "/cone_sin.json");
  const double L = s.H.lipschitz();
  const double h = s.numerics.h;
  double worst = 0.0;
  double nodes = 0.0;
  // bumps near each end, trapezoid strictly beyond L T + 10 h of their support
  for (const auto& [bump, c, d] :
       std::vector<std::tuple<Bump, double, double>>{
           {Bump{-1.8, 0.2, 0.5}, -1.6 + L * s.T + 10 * h + h, 2.0},
           {Bump{1.7, 0.3, -0.4}, -2.0, 1.4 - L * s.T - 10 * h - h},
           {Bump{0.0, 0.1, 1.0}, 0.1 + L * s.T + 10 * h + h, 2.0}}) {
    const auto r = check_cone(s, bump, c, d);
    worst = std::max(worst, r.measured.at("max_abs_difference"));
    nodes += r.measured.at("nodes_compared");
  }
  Detail d;
  d.le("max_abs_difference", worst, 1e-15);
  d.os << " node_values=" << nodes;
  return d.done();
}

Outcome envelope_algebra() {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> N(3, 200);
  std::uniform_real_distribution<double> V(-5.0, 5.0);
  std::bernoulli_distribution ex(0.15);
  double worst = 0.0, ignored = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = N(rng);
    GridFn z{0.0, 1.0 / static_cast<double>(n), std::vector<double>(n)};
    for (auto& v : z.values) v = V(rng);
    // isolated exceptional nodes (no two adjacent)
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < n; ++i) {
      if (ex(rng) && (nodes.empty() || nodes.back() + 1 < i)) nodes.push_back(i);
    }
    worst = std::max(worst, envelope_idempotence(z, nodes).max_deviation());
    const auto e1 = essential_envelopes(z, nodes);
    auto z2 = z;
    for (auto i : nodes) z2.values[i] = 1e6 * V(rng);
    const auto e2 = essential_envelopes(z2, nodes);
    for (std::size_t i = 0; i < n; ++i) {
      ignored = std::max({ignored, std::abs(e1.upper.values[i] - e2.upper.values[i]),
                          std::abs(e1.lower.values[i] - e2.lower.values[i])});
    }
  }
  Detail d;
  d.le("max_idempotence_deviation", worst, 0.0);
  d.le("exceptional_value_influence", ignored, 0.0);
  return d.done();
}

Outcome dual_consistency() {
  Detail d;
  std::vector<double> dist;
  for (double h : {4e-3, 2e-3, 1e-3}) {
    auto s = load_scenario(kFixtures + "/dual_sin.json");
    s.numerics.h = h;
    const auto sol = run(s);
    const auto cl = dual_run(s, sol);
    dist.push_back(dual_distance(sol, cl, {0.05, s.window->first, s.window->second}));
  }
  d.le("L1_at_1e-3", dist.back(), 0.05);
  d.flag("decreasing", dist[0] > dist[1] && dist[1] > dist[2]);
  d.os << " (" << format_double(dist[0]) << ", " << format_double(dist[1]) << ")";

  // mass: periodic cos data on [0, 2 pi) and a compact bump with outflow ends
  const std::size_t n = 6283;
  CLState p;
  p.h = 2 * M_PI / n;
  p.bc = CLBoundary::Periodic;
  for (std::size_t i = 0; i < n; ++i) p.values.push_back(std::cos(p.center(i)));
  const auto traj = solve_cl(p, 0.1, HamiltonianSpec::sine(), 1.0, 0.5, 0.01);
  double drift = std::abs(traj.back().mass() - traj.front().mass());
  CLState b;
  b.h = 1e-3;
  b.values.assign(3000, 0.0);
  for (std::size_t i = 1000; i < 2000; ++i) b.values[i] = std::sin(M_PI * (i - 1000) / 1000.0);
  const auto tb = solve_cl(b, 0.1, HamiltonianSpec::sine(), 1.0, 0.5, 0.01);
  drift = std::max(drift, std::abs(tb.back().mass() - tb.front().mass()));
  d.le("mass_drift", drift, 1e-12);
  return d.done();
}

Outcome self_convergence() {
  Detail d;
  {
    auto s = load_scenario(kFixtures + "/smooth_sin.json");
    const auto st = convergence_study(s, 3);
    d.ge("smooth_sup_rate", st.report.measured.at("sup_rate"), 0.8);
    d.ge("smooth_l1_rate", st.report.measured.at("l1_rate"), 0.8);
  }
  for (const char* name : {"riemann_sin", "riemann_tanh"}) {
    auto s = load_scenario(kFixtures + "/" + name + ".json");
    s.numerics.h = 4e-3;  // levels 4e-3, 2e-3, 1e-3
    const auto st = convergence_study(s, 3);
    d.ge(std::string(name) + "_trace_rate", st.report.measured.at("trace_rate"), 0.4);
    d.ge(std::string(name) + "_tau_rate", st.report.measured.at("tau_rate"), 0.4);
  }
  return d.done();
}

Outcome determinism() {
  Detail d;
  for (const char* name : {"two_jumps", "riemann_sin"}) {
    auto s = load_scenario(kFixtures + "/" + name + ".json");
    s.numerics.h = kH;
    const auto r = check_determinism(s);
    d.flag(std::string(name) + "_bit_identical", r.measured.at("rerun_mismatch") == 0.0);
    d.flag(std::string(name) + "_l1_shrinks", r.measured.at("l1_not_decreasing") == 0.0);
    d.os << " (" << format_double(r.measured.at("l1_h_vs_h2")) << " -> "
         << format_double(r.measured.at("l1_h2_vs_h4")) << ")";
  }
  return d.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"affine exactness", affine_exactness},
      {"Hamiltonian constants", constants},
      {"sharp collapse, sin", sharp_sin},
      {"sharp collapse, tanh", sharp_tanh},
      {"persistence", persistence},
      {"decay law", decay_law},
      {"sign preservation and J monotonicity", sign_and_monotonicity},
      {"comparison contraction", comparison},
      {"sandwich", sandwich},
      {"time-Lipschitz", time_lipschitz},
      {"barrier decoupling", barrier},
      {"finite-speed cone", cone},
      {"envelope algebra", envelope_algebra},
      {"dual consistency", dual_consistency},
      {"self-convergence", self_convergence},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string(" exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %2zu %s:%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
