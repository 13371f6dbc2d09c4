// hjump: run, check and refine jump-decomposition HJ scenarios.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hjump/dual_cl.hpp"
#include "hjump/error.hpp"
#include "hjump/orchestrator.hpp"
#include "hjump/scenario_io.hpp"
#include "hjump/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hjump;

namespace {

struct Overrides {
  std::optional<double> h, cfl, record_every;
};

unsigned thread_count() {
  const char* env = std::getenv("HJ_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 256) throw InputError("HJ_THREADS must be an integer in [1, 256]");
  return static_cast<unsigned>(n);
}

Scenario load(const std::string& path, const Overrides& o) {
  Scenario s = load_scenario(path);
  if (o.h) s.numerics.h = *o.h;
  if (o.cfl) s.numerics.cfl = *o.cfl;
  if (o.record_every) s.numerics.record_every = *o.record_every;
  computational_geometry(s);  // re-validate after overrides
  return s;
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  fs::create_directories(dir);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw InputError("cannot write " + p.string());
  f << text;
}

int cmd_run(const Scenario& s, const std::string& out) {
  const Solution sol = run(s, thread_count());
  const fs::path dir = out.empty() ? fs::path("out") : fs::path(out);
  ensure_dir(dir.string());
  {
    std::ofstream f(dir / "snapshots.csv", std::ios::binary);
    write_snapshots_csv(sol, f);
  }
  for (std::size_t k = 0; k < sol.initial_intervals.size(); ++k) {
    std::ofstream f(dir / ("interval_" + std::to_string(k) + "_traces.csv"), std::ios::binary);
    write_interval_traces_csv(sol, k, f);
  }
  for (std::size_t j = 0; j < sol.jumps.size(); ++j) {
    std::ofstream f(dir / ("jump_" + std::to_string(j) + "_traces.csv"), std::ios::binary);
    write_jump_traces_csv(sol, j, f);
  }
  write_file(dir / "report.json", solution_report(sol, s).dump(2) + "\n");

  std::cout << "scenario " << s.name << " [" << sol.fingerprint << "]  nodes=" << sol.geometry.n_nodes
            << " dt=" << format_double(sol.dt) << " records=" << sol.snapshots.size() << "\n";
  for (std::size_t j = 0; j < sol.jumps.size(); ++j) {
    const auto& r = sol.jumps[j];
    std::cout << "  jump " << j << " x=" << r.x << " " << to_string(r.sign) << " J0=" << r.J0
              << " t_lower=" << r.t_lower
              << " tau=" << (r.tau ? format_double(*r.tau) : std::string("none")) << "\n";
  }
  std::cout << "wrote " << dir.string() << "\n";
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Default perturbations for the structural checks, sized from the grid.
Bump barrier_bump(const Scenario& s, const Geometry& g) {
  const double xj = s.u0.breakpoints().front();
  const double right_end = s.u0.breakpoints().size() > 1 ? s.u0.breakpoints()[1] : g.b();
  const double hw = 0.25 * (right_end - xj);
  return {xj + 2.0 * hw, hw, 0.1};
}

CheckReport default_cone(const Scenario& s, const Geometry& g) {
  const double L = s.H.lipschitz();
  const double reach = L * s.T + 10.0 * g.h;
  const double width = g.b() - g.a;
  // bump in the leftmost sixth, trapezoid starting beyond its cone
  const double hw = width / 12.0;
  const Bump bump{g.a + hw, hw, 0.1};
  const double c = g.a + 2.0 * hw + reach + g.h;
  const double d = g.b();
  if (d - c < 2.0 * L * s.T) throw InputError("cone: domain too narrow for a default trapezoid");
  return check_cone(s, bump, c, d);
}

int cmd_check(const Scenario& s, const std::string& checks, const std::string& out, int levels) {
  const unsigned threads = thread_count();
  const Solution sol = run(s, threads);
  const bool has_jumps = !sol.jumps.empty();
  std::vector<std::string> names = split_list(checks);
  if (names.empty()) {
    names = {"sandwich", "time_lipschitz", "comparison", "determinism"};
    names.push_back(has_jumps ? "jump_laws" : "dual");
  }

  json reports = json::array();
  bool all = true;
  for (const auto& name : names) {
    CheckReport r;
    if (name == "sandwich") {
      r = check_sandwich(sol);
    } else if (name == "time_lipschitz") {
      r = check_time_lipschitz(sol);
    } else if (name == "comparison") {
      Scenario v = s;
      v.u0 = s.u0.shifted(1.0);
      r = check_comparison(sol, run(v, threads));
    } else if (name == "jump_laws") {
      r = check_jump_laws(sol);
    } else if (name == "determinism") {
      r = check_determinism(s);
    } else if (name == "dual") {
      r = cross_check(sol, dual_run(s, sol));
    } else if (name == "barrier") {
      if (!has_jumps) throw InputError("check barrier: scenario has no jumps");
      r = check_barrier(s, Side::Right, 0, barrier_bump(s, sol.geometry));
    } else if (name == "cone") {
      r = default_cone(s, sol.geometry);
    } else if (name == "convergence") {
      r = convergence_study(s, levels).report;
    } else {
      throw InputError("unknown check '" + name +
                       "' (sandwich, time_lipschitz, comparison, jump_laws, determinism, dual, "
                       "barrier, cone, convergence)");
    }
    all = all && r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name;
    for (const auto& [k, v] : r.measured) std::cout << "  " << k << "=" << format_double(v);
    std::cout << "\n";
    reports.push_back(report_to_json(r));
  }
  if (!out.empty()) {
    ensure_dir(out);
    write_file(fs::path(out) / "checks.json", reports.dump(2) + "\n");
  }
  return all ? 0 : 1;
}

int cmd_converge(const Scenario& s, int levels, const std::string& out) {
  const auto study = convergence_study(s, levels);
  std::cout << "h,sup_diff,l1_diff,trace_diff,tau_diff,sup_rate,l1_rate,trace_rate,tau_rate\n";
  json rows = json::array();
  for (std::size_t l = 0; l < study.rows.size(); ++l) {
    const auto& r = study.rows[l];
    std::cout << format_double(r.h);
    if (l + 1 < study.rows.size()) {
      std::cout << ',' << format_double(r.sup_diff) << ',' << format_double(r.l1_diff) << ','
                << format_double(r.trace_diff) << ',' << format_double(r.tau_diff);
      if (l + 2 < study.rows.size()) {
        const auto& f = study.rows[l + 1];
        std::cout << ',' << format_double(convergence_rate(r.sup_diff, f.sup_diff)) << ','
                  << format_double(convergence_rate(r.l1_diff, f.l1_diff)) << ','
                  << format_double(convergence_rate(r.trace_diff, f.trace_diff)) << ','
                  << format_double(convergence_rate(r.tau_diff, f.tau_diff));
      }
    }
    std::cout << '\n';
    rows.push_back({{"h", r.h}, {"sup_diff", r.sup_diff}, {"l1_diff", r.l1_diff},
                    {"trace_diff", r.trace_diff}, {"tau_diff", r.tau_diff}, {"tau", r.tau}});
  }
  const auto& rep = study.report;
  std::cout << (rep.pass ? "PASS" : "FAIL") << " convergence (" << rep.note << ")\n";
  if (!out.empty()) {
    ensure_dir(out);
    write_file(fs::path(out) / "convergence.json",
               json{{"rows", rows}, {"report", report_to_json(rep)}}.dump(2) + "\n");
  }
  return rep.pass ? 0 : 1;
}

Scenario riemann(const std::string& name, HamiltonianSpec H, double h) {
  Scenario s;
  s.name = name;
  s.a = -2.0;
  s.b = 2.0;
  s.T = 1.0;
  s.H = std::move(H);
  s.u0 = PiecewiseFn(-2.0, 2.0, {0.0}, {Segment{ConstantSegment{0.0}, {}}, Segment{ConstantSegment{1.0}, {}}});
  s.numerics.h = h;
  return s;
}

bool expect(bool ok, const std::string& what) {
  std::cout << "  " << (ok ? "ok   " : "FAIL ") << what << "\n";
  return ok;
}

int cmd_riemann(const Overrides& o) {
  const double h = o.h.value_or(1e-3);
  const unsigned threads = thread_count();
  bool all = true;

  {
    const Scenario s = riemann("riemann_sin", HamiltonianSpec::sine(), h);
    const Solution sol = run(s, threads);
    const auto& rec = sol.jumps[0];
    std::cout << "riemann_sin [" << sol.fingerprint << "]\n";
    const double tau = rec.tau.value_or(NAN);
    all &= expect(tau >= 0.45 && tau <= 0.55, "tau=" + format_double(tau) + " in [0.45, 0.55]");
    double el = 0.0, er = 0.0;
    for (const auto& p : rec.series) {
      if (p.t > 0.4) break;
      el = std::max(el, std::abs(p.left - p.t));
      er = std::max(er, std::abs(p.right - (1.0 - p.t)));
    }
    all &= expect(el <= 0.02, "left trace vs t, max err " + format_double(el));
    all &= expect(er <= 0.02, "right trace vs 1-t, max err " + format_double(er));
  }
  {
    const Scenario s = riemann("riemann_tanh", HamiltonianSpec::tanh(), h);
    const Solution sol = run(s, threads);
    const auto& rec = sol.jumps[0];
    std::cout << "riemann_tanh [" << sol.fingerprint << "]\n";
    const double tau = rec.tau.value_or(NAN);
    double el = 0.0, er = 0.0;
    for (const auto& p : rec.series) {
      if (rec.tau && p.t >= *rec.tau) break;
      el = std::max(el, std::abs(p.left));
      er = std::max(er, std::abs(p.right - (1.0 - p.t)));
    }
    all &= expect(tau >= 0.93 && tau <= 1.07, "tau=" + format_double(tau) + " in [0.93, 1.07]");
    all &= expect(el <= 1e-3, "left trace vs 0, max err " + format_double(el));
    all &= expect(er <= 0.02, "right trace vs 1-t, max err " + format_double(er));
  }
  {
    const Scenario s = riemann("riemann_constant", HamiltonianSpec::constant(0.5), h);
    const Solution sol = run(s, threads);
    const auto& rec = sol.jumps[0];
    std::cout << "riemann_constant [" << sol.fingerprint << "]\n";
    double drift = 0.0;
    for (const auto& p : rec.series) drift = std::max(drift, std::abs(p.J - rec.J0));
    all &= expect(!rec.tau, "no collapse");
    all &= expect(drift <= kRoundoff, "J constant, drift " + format_double(drift));
    all &= expect(rec.t_lower == s.T, "t_lower = T");
  }
  std::cout << (all ? "all Riemann expectations met\n" : "Riemann expectations FAILED\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jump-decomposition solver for 1-D Hamilton-Jacobi equations"};
  app.set_help_flag("--help", "print help");  // -h would clash with --h
  app.require_subcommand(1);
  std::string scenario_path, out, checks;
  int levels = 3;
  Overrides o;

  auto add_common = [&](CLI::App* c, bool needs_scenario) {
    auto* opt = c->add_option("--scenario", scenario_path, "scenario JSON file");
    if (needs_scenario) opt->required()->check(CLI::ExistingFile);
    c->add_option("--h", o.h, "grid spacing override")->check(CLI::PositiveNumber);
    c->add_option("--cfl", o.cfl, "CFL number override")->check(CLI::Range(1e-12, 1.0));
    c->add_option("--record-every", o.record_every, "record cadence override")
        ->check(CLI::PositiveNumber);
  };
  auto* run_cmd = app.add_subcommand("run", "evolve a scenario, write snapshots, traces and a report");
  add_common(run_cmd, true);
  run_cmd->add_option("--out", out, "output directory (default: out)");

  auto* check_cmd = app.add_subcommand("check", "run named checks; nonzero exit if any fails");
  add_common(check_cmd, true);
  check_cmd->add_option("--checks", checks, "comma-separated check names (default: applicable set)");
  check_cmd->add_option("--out", out, "directory for checks.json");
  check_cmd->add_option("--levels", levels, "refinement levels for 'convergence'")
      ->check(CLI::Range(3, 8));

  auto* conv_cmd = app.add_subcommand("converge", "self-convergence table over h, h/2, ...");
  add_common(conv_cmd, true);
  conv_cmd->add_option("--levels", levels, "refinement levels")->check(CLI::Range(3, 8));
  conv_cmd->add_option("--out", out, "directory for convergence.json");

  auto* riem_cmd = app.add_subcommand("riemann", "built-in Riemann problems with asserted expectations");
  add_common(riem_cmd, false);

  CLI11_PARSE(app, argc, argv);

  std::string fingerprint = "-";
  try {
    if (riem_cmd->parsed()) return cmd_riemann(o);
    const Scenario s = load(scenario_path, o);
    fingerprint = scenario_fingerprint(s);
    if (run_cmd->parsed()) return cmd_run(s, out);
    if (check_cmd->parsed()) return cmd_check(s, checks, out, levels);
    if (conv_cmd->parsed()) return cmd_converge(s, levels, out);
  } catch (const std::exception& e) {
    std::cerr << "error [scenario " << fingerprint << "]: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
