#include <doctest.h>

#include <cmath>

#include "hjump/error.hpp"
#include "hjump/orchestrator.hpp"

using namespace hjump;

namespace {

Segment constant(double v) { return {ConstantSegment{v}, {}}; }
Segment affine(double m, double c) { return {AffineSegment{m, c}, {}}; }

Scenario riemann(HamiltonianSpec H, double left = 0.0, double right = 1.0, double h = 1e-3) {
  Scenario s;
  s.name = "riemann";
  s.a = -2.0;
  s.b = 2.0;
  s.T = 1.0;
  s.H = std::move(H);
  s.u0 = PiecewiseFn(-2.0, 2.0, {0.0}, {constant(left), constant(right)});
  s.numerics.h = h;
  return s;
}

IntervalState piece(double a, double b, std::size_t n, double v, double t = 0.3) {
  IntervalState s;
  s.grid = IntervalGrid::make(a, b, n, BCTag::singular_plus(), BCTag::singular_plus());
  s.values.assign(n, v);
  s.t = t;
  return s;
}

}  // namespace

TEST_CASE("decompose") {
  Geometry g{-1.0, 0.01, 201};
  SUBCASE("continuous data") {
    const auto d = decompose(PiecewiseFn::continuous(-1, 1, affine(1, 0)), g);
    CHECK(d.intervals.size() == 1);
    CHECK(d.jumps.empty());
    CHECK(d.intervals[0].first == 0);
    CHECK(d.intervals[0].last == 200);
  }
  SUBCASE("single up-jump") {
    const auto d = decompose(PiecewiseFn(-1, 1, {0.0}, {constant(0), constant(1)}), g);
    REQUIRE(d.intervals.size() == 2);
    CHECK(d.intervals[0].last == 100);
    CHECK(d.intervals[1].first == 100);
    REQUIRE(d.jumps.size() == 1);
    CHECK(d.jumps[0].sign == JumpSign::Up);
    CHECK(d.jumps[0].J0 == 1.0);
    CHECK(d.jumps[0].node == 100);
  }
  SUBCASE("up then down") {
    const auto d = decompose(PiecewiseFn(-1, 1, {0.0, 0.5}, {constant(0), constant(1), constant(0.2)}), g);
    CHECK(d.intervals.size() == 3);
    REQUIRE(d.jumps.size() == 2);
    CHECK(d.jumps[0].sign == JumpSign::Up);
    CHECK(d.jumps[1].sign == JumpSign::Down);
    CHECK(d.jumps[1].J0 == doctest::Approx(0.8));
  }
}

TEST_CASE("assign_bcs") {
  CHECK(assign_bcs(JumpSign::Up) == std::pair{BCTag::singular_plus(), BCTag::singular_plus()});
  CHECK(assign_bcs(JumpSign::Down) == std::pair{BCTag::singular_minus(), BCTag::singular_minus()});
}

TEST_CASE("min_persistence") {
  CHECK(min_persistence(1.0, compute_bounds(HamiltonianSpec::sine()), 2.0) == 0.5);
  CHECK(min_persistence(1.0, compute_bounds(HamiltonianSpec::constant(0.2)), 2.0) == 2.0);
  CHECK(min_persistence(0.2, compute_bounds(HamiltonianSpec::tanh()), 1.0) == doctest::Approx(0.1));
  CHECK(min_persistence(5.0, compute_bounds(HamiltonianSpec::tanh()), 1.0) == 1.0);
  CHECK_THROWS_AS(min_persistence(0.0, compute_bounds(HamiltonianSpec::tanh()), 1.0), InputError);
}

TEST_CASE("detect_collapse") {
  JumpRecord rec;
  for (int i = 0; i <= 10; ++i) {
    const double t = 0.1 * i;
    rec.series.push_back({t, t, 1.0 - t, std::abs(1.0 - 2.0 * t)});
  }
  const auto tau = detect_collapse(rec, 0.05);
  REQUIRE(tau);
  CHECK(*tau == doctest::Approx(0.45));  // midpoint of [0.4, 0.5]

  JumpRecord flat;
  for (int i = 0; i <= 10; ++i) flat.series.push_back({0.1 * i, 0.0, 1.0, 1.0});
  CHECK(!detect_collapse(flat, 0.05));
}

TEST_CASE("merge_intervals") {
  SUBCASE("two constants at 0.5") {
    const auto m = merge_intervals(piece(-1, 0, 11, 0.5), piece(0, 1, 11, 0.5), 0.01);
    CHECK(m.grid.n == 21);
    CHECK(m.grid.a == -1.0);
    CHECK(m.grid.b == 1.0);
    CHECK(m.grid.h == doctest::Approx(0.1));
    for (double v : m.values) CHECK(v == 0.5);
  }
  SUBCASE("shared node takes the mean, outer tags survive") {
    auto l = piece(-1, 0, 11, 0.5);
    auto r = piece(0, 1, 11, 0.5);
    l.grid.bc_left = BCTag::singular_minus();
    r.grid.bc_right = BCTag::free();
    l.values.back() = 0.496;
    r.values.front() = 0.504;
    const auto m = merge_intervals(l, r, 0.01);
    CHECK(m.values[10] == doctest::Approx(0.5));
    CHECK(m.grid.bc_left == BCTag::singular_minus());
    CHECK(m.grid.bc_right == BCTag::free());
  }
  SUBCASE("gap above tolerance") {
    auto r = piece(0, 1, 11, 0.8);
    CHECK_THROWS_AS(merge_intervals(piece(-1, 0, 11, 0.5), r, 0.01), ConsistencyError);
  }
  SUBCASE("non-adjacent or out of sync") {
    CHECK_THROWS_AS(merge_intervals(piece(-1, 0, 11, 0.5), piece(0.5, 1, 11, 0.5), 0.01),
                    ConsistencyError);
    CHECK_THROWS_AS(merge_intervals(piece(-1, 0, 11, 0.5), piece(0, 1, 11, 0.5, 0.4), 0.01),
                    ConsistencyError);
  }
}

TEST_CASE("computational_geometry validation") {
  auto s = riemann(HamiltonianSpec::sine());
  CHECK(computational_geometry(s).n_nodes == 4001);

  SUBCASE("breakpoint off the grid") {
    s.u0 = PiecewiseFn(-2, 2, {0.0005}, {constant(0), constant(1)});
    CHECK_THROWS_AS(computational_geometry(s), InputError);
  }
  SUBCASE("piece with fewer than 3 nodes") {
    s.u0 = PiecewiseFn(-2, 2, {0.0, 0.001}, {constant(0), constant(1), constant(0)});
    CHECK_THROWS_AS(computational_geometry(s), InputError);
  }
  SUBCASE("unbounded without a window") {
    s.a = -INFINITY;
    CHECK_THROWS_AS(computational_geometry(s), InputError);
  }
  SUBCASE("alpha below L") {
    s.numerics.alpha = 0.5;
    CHECK_THROWS_AS(computational_geometry(s), ConfigError);
  }
  SUBCASE("bad numerics") {
    s.numerics.cfl = 1.5;
    CHECK_THROWS_AS(computational_geometry(s), InputError);
    s.numerics.cfl = 0.5;
    s.T = -1.0;
    CHECK_THROWS_AS(computational_geometry(s), InputError);
  }
  SUBCASE("unbounded ends are padded by L T + 10 h") {
    s.a = -INFINITY;
    s.b = INFINITY;
    s.window = std::pair{-1.0, 1.0};
    s.u0 = PiecewiseFn(-INFINITY, INFINITY, {0.0}, {constant(0), constant(1)});
    const auto g = computational_geometry(s);
    CHECK(g.a == doctest::Approx(-1.0 - 1.01));
    CHECK(g.b() == doctest::Approx(1.0 + 1.01));
    const auto sol = run(s);
    REQUIRE(sol.jumps.size() == 1);
    CHECK(sol.jumps[0].tau.value() == doctest::Approx(0.5).epsilon(0.02));
  }
}

TEST_CASE("run: continuous data has one piece and no merges") {
  Scenario s;
  s.a = -1;
  s.b = 1;
  s.T = 0.2;
  s.H = HamiltonianSpec::sine();
  s.u0 = PiecewiseFn::continuous(-1, 1, affine(2, 1));
  s.numerics.h = 0.01;
  const auto sol = run(s);
  CHECK(sol.jumps.empty());
  CHECK(sol.merges.empty());
  CHECK(sol.snapshots.size() == 21);
  for (const auto& snap : sol.snapshots) CHECK(snap.slices.size() == 1);
  const auto f = sol.field(sol.snapshots.size() - 1);
  for (std::size_t i = 0; i < f.minus.size(); ++i)
    CHECK(std::abs(f.minus[i] - (2 * sol.geometry.x(i) + 1 - 0.2 * std::sin(2.0))) <= 1e-10);
}

TEST_CASE("run: sin Riemann merges once near 0.5 and stays continuous") {
  const auto sol = run(riemann(HamiltonianSpec::sine()));
  REQUIRE(sol.jumps.size() == 1);
  const auto& rec = sol.jumps[0];
  CHECK(rec.t_lower == 0.5);
  CHECK(rec.decay_rate_bound == 2.0);
  REQUIRE(rec.tau);
  CHECK(*rec.tau >= 0.45);
  CHECK(*rec.tau <= 0.55);
  REQUIRE(sol.merges.size() == 1);
  CHECK(sol.merges[0].t == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sol.merges[0].merged_value == doctest::Approx(0.5).epsilon(0.01));
  // after the merge the field is one slice and has no jump at the old node
  const auto& last = sol.snapshots.back();
  CHECK(last.slices.size() == 1);
  const auto f = sol.field(sol.snapshots.size() - 1);
  CHECK(f.minus[rec.node] == f.plus[rec.node]);
  double max_step = 0.0;
  for (std::size_t i = 1; i < f.minus.size(); ++i) max_step = std::max(max_step, std::abs(f.minus[i] - f.minus[i - 1]));
  CHECK(max_step <= 0.01);
}

TEST_CASE("run: constant H translates both traces and never merges") {
  auto s = riemann(HamiltonianSpec::constant(0.25));
  const auto sol = run(s);
  const auto& rec = sol.jumps[0];
  CHECK(!rec.tau);
  CHECK(sol.merges.empty());
  CHECK(rec.t_lower == s.T);
  CHECK(rec.series.back().J == doctest::Approx(rec.J0).epsilon(1e-12));
  CHECK(rec.series.back().left == doctest::Approx(-0.25));
  CHECK(rec.series.back().right == doctest::Approx(0.75));
}

TEST_CASE("run: snapshots keep both traces at an active jump") {
  const auto sol = run(riemann(HamiltonianSpec::tanh(), 0.0, 1.0, 0.01));
  const auto f = sol.field(10);  // t = 0.1
  const auto node = sol.jumps[0].node;
  CHECK(f.minus[node] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.plus[node] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(f.upper(node) == f.plus[node]);
  CHECK(f.lower(node) == f.minus[node]);
}

TEST_CASE("run: threaded stepping is bit-identical to sequential") {
  Scenario s = riemann(HamiltonianSpec::sine(), 0.0, 1.0, 0.004);
  s.u0 = PiecewiseFn(-2, 2, {-1.0, 0.0, 1.0},
                     {affine(0.2, 0), constant(1.0), affine(-0.3, 0.1), constant(-0.5)});
  const auto a = run(s, 1);
  const auto b = run(s, 3);
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    REQUIRE(a.snapshots[k].slices.size() == b.snapshots[k].slices.size());
    for (std::size_t j = 0; j < a.snapshots[k].slices.size(); ++j)
      CHECK(a.snapshots[k].slices[j].values == b.snapshots[k].slices[j].values);
  }
  CHECK(a.merges.size() == b.merges.size());
}

TEST_CASE("run: barrier, left piece ignores right data while the jump is open") {
  auto s = riemann(HamiltonianSpec::tanh(), 0.0, 1.0, 0.004);
  auto p = s;
  p.u0 = PiecewiseFn(-2, 2, {0.0}, {constant(0.0), affine(0.3, 2.0)});
  const auto a = run(s);
  const auto b = run(p);
  const double cut = std::min(a.jumps[0].tau.value_or(1e9), b.jumps[0].tau.value_or(1e9));
  const auto node = a.jumps[0].node;
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    if (!(a.snapshots[k].t < cut)) break;
    const auto fa = a.field(k), fb = b.field(k);
    for (std::size_t i = 0; i <= node; ++i) CHECK(fa.minus[i] == fb.minus[i]);
  }
}

TEST_CASE("run: merges happen at most once per jump") {
  Scenario s = riemann(HamiltonianSpec::sine(), 0.0, 1.0, 0.004);
  s.u0 = PiecewiseFn(-2, 2, {-1.0, 0.0, 1.0},
                     {constant(0.0), constant(0.4), constant(0.0), constant(0.3)});
  const auto sol = run(s);
  CHECK(sol.merges.size() <= sol.jumps.size());
  CHECK(sol.merges.size() == 3);
  CHECK(sol.snapshots.back().slices.size() == 1);
}
