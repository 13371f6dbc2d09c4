#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hjump/envelope.hpp"
#include "hjump/hamiltonian.hpp"
#include "hjump/scheme.hpp"

namespace hjump {

struct Numerics {
  double h = 1e-3;
  double cfl = 0.5;
  double record_every = 0.01;
  std::optional<double> alpha;  // defaults to ||H'||_inf
  std::optional<double> tol_J;  // defaults to max(10 h L, 1e-6)
};

/// Problem (CP) when both ends are infinite, otherwise a Neumann-type problem
/// whose finite ends carry `left_bc` / `right_bc`. Infinite ends are truncated
/// to `window` padded by L*T + 10h and use free outflow.
struct Scenario {
  std::string name;
  double a = 0.0;
  double b = 1.0;
  std::optional<std::pair<double, double>> window;
  double T = 1.0;
  HamiltonianSpec H = HamiltonianSpec::constant(0.0);
  PiecewiseFn u0 = PiecewiseFn::continuous(0.0, 1.0, Segment{ConstantSegment{0.0}, {}});
  BCTag left_bc = BCTag::free();
  BCTag right_bc = BCTag::free();
  Numerics numerics;
};

/// The uniform node set x_i = a + i h shared by every subinterval.
struct Geometry {
  double a = 0.0;
  double h = 1.0;
  std::size_t n_nodes = 0;

  double x(std::size_t i) const { return a + h * static_cast<double>(i); }
  double b() const { return x(n_nodes - 1); }
  friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Validates the scenario and returns the computational grid. Breakpoints must
/// fall on grid nodes.
Geometry computational_geometry(const Scenario& s);

enum class JumpSign { Up, Down };
const char* to_string(JumpSign s);

struct JumpSample {
  double t = 0.0;
  double left = 0.0;
  double right = 0.0;
  double J = 0.0;
};

struct JumpRecord {
  double x = 0.0;
  std::size_t node = 0;
  JumpSign sign = JumpSign::Up;
  double J0 = 0.0;
  double t_lower = 0.0;
  std::optional<double> tau;
  double decay_rate_bound = 0.0;
  std::vector<JumpSample> series;
  std::optional<double> merged_at;
};

struct NodeSpan {
  std::size_t first = 0;
  std::size_t last = 0;
};

struct Decomposition {
  std::vector<NodeSpan> intervals;
  std::vector<JumpRecord> jumps;
};

Decomposition decompose(const PiecewiseFn& u0, const Geometry& g);

/// (tag for the left piece's right end, tag for the right piece's left end).
std::pair<BCTag, BCTag> assign_bcs(JumpSign sign);

double min_persistence(double J0, const HamiltonianBounds& bounds, double T);

/// Midpoint of the sample interval in which J first drops to tol_J or below.
std::optional<double> detect_collapse(const JumpRecord& record, double tol_J);

/// Concatenates two adjacent states sharing an end node. The shared node takes
/// the mean of the two traces and the facing tags disappear.
IntervalState merge_intervals(const IntervalState& left, const IntervalState& right,
                              double tol_J);

struct Slice {
  std::size_t first = 0;
  std::vector<double> values;

  std::size_t last() const { return first + values.size() - 1; }
};

struct Snapshot {
  double t = 0.0;
  std::vector<Slice> slices;
};

/// One-sided node values of a snapshot. `minus[i]` comes from the piece on the
/// left of node i, `plus[i]` from the piece on its right; they differ only at
/// active jumps.
struct SnapshotField {
  std::vector<double> minus;
  std::vector<double> plus;

  double upper(std::size_t i) const { return std::max(minus[i], plus[i]); }
  double lower(std::size_t i) const { return std::min(minus[i], plus[i]); }
};

struct MergeEvent {
  double t = 0.0;
  std::size_t jump = 0;
  double x = 0.0;
  double left_trace = 0.0;
  double right_trace = 0.0;
  double merged_value = 0.0;
};

struct Solution {
  std::string scenario_name;
  std::string fingerprint;
  Geometry geometry;
  double T = 0.0;
  HamiltonianBounds bounds;
  double alpha = 0.0;
  double dt = 0.0;
  double record_every = 0.0;
  double tol_J = 0.0;
  double merge_tol = 0.0;

  std::vector<Snapshot> snapshots;
  std::vector<JumpRecord> jumps;
  std::vector<NodeSpan> initial_intervals;
  std::vector<std::vector<TracePoint>> interval_traces;  // per initial interval
  std::vector<MergeEvent> merges;

  SnapshotField field(std::size_t snapshot) const;
};

/// Runs the jump-decomposition procedure: split at jumps, evolve each piece
/// with singular Neumann ends, detect collapse, merge, continue to T.
/// `threads` > 1 steps the pieces concurrently between events.
Solution run(const Scenario& s, unsigned threads = 1);

/// Initial-value helper shared with the tests: values of u0 on a span.
std::vector<double> sample_piece(const PiecewiseFn& u0, std::size_t piece, const Geometry& g,
                                 NodeSpan span);

}  // namespace hjump
