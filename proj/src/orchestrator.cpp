#include "hjump/orchestrator.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include "hjump/error.hpp"
#include "hjump/scenario_io.hpp"
#include "hjump/time_clock.hpp"

namespace hjump {

const char* to_string(JumpSign s) { return s == JumpSign::Up ? "up" : "down"; }

namespace {

std::size_t aligned_index(double x, double a, double h, const char* what) {
  const double pos = (x - a) / h;
  const double r = std::round(pos);
  if (std::abs(pos - r) > 1e-6) {
    std::ostringstream msg;
    msg << what << " x=" << x << " does not fall on a grid node (offset " << pos
        << " spacings from a=" << a << "); choose h dividing the distance";
    throw InputError(msg.str());
  }
  return static_cast<std::size_t>(r);
}

void validate_numerics(const Scenario& s) {
  const auto& nm = s.numerics;
  if (!(s.T > 0.0) || !std::isfinite(s.T)) throw InputError("T must be positive and finite");
  if (!(nm.h > 0.0) || !std::isfinite(nm.h)) throw InputError("numerics.h must be positive");
  if (!(nm.cfl > 0.0 && nm.cfl <= 1.0)) throw InputError("numerics.cfl must lie in (0, 1]");
  if (!(nm.record_every > 0.0) || !std::isfinite(nm.record_every))
    throw InputError("numerics.record_every must be positive");
  if (nm.alpha && *nm.alpha < s.H.lipschitz()) {
    std::ostringstream msg;
    msg << "numerics.alpha=" << *nm.alpha << " is below ||H'||=" << s.H.lipschitz();
    throw ConfigError(msg.str());
  }
  if (nm.tol_J && !(*nm.tol_J > 0.0)) throw InputError("numerics.tolerances.tol_J must be > 0");
}

double collapse_midpoint(const std::vector<JumpSample>& series, std::size_t i) {
  return i == 0 ? series[0].t : 0.5 * (series[i - 1].t + series[i].t);
}

}  // namespace

Geometry computational_geometry(const Scenario& s) {
  validate_numerics(s);
  const double h = s.numerics.h;
  const bool a_inf = std::isinf(s.a);
  const bool b_inf = std::isinf(s.b);
  if (!(s.a < s.b)) throw InputError("domain: need a < b");
  if ((a_inf || b_inf) && !s.window)
    throw InputError("domain: an unbounded domain needs a finite window [lo, hi]");
  if (a_inf && s.left_bc.kind != BCTag::Kind::Free)
    throw InputError("boundary.left: an infinite end carries no boundary condition");
  if (b_inf && s.right_bc.kind != BCTag::Kind::Free)
    throw InputError("boundary.right: an infinite end carries no boundary condition");

  const double pad = s.H.lipschitz() * s.T + 10.0 * h;
  const auto pad_cells = static_cast<std::size_t>(std::ceil(pad / h - 1e-9));
  Geometry g;
  g.h = h;
  if (a_inf) {
    if (!(s.window->first < s.window->second)) throw InputError("domain.window: need lo < hi");
    g.a = s.window->first - h * static_cast<double>(pad_cells);
  } else {
    g.a = s.a;
  }
  std::size_t cells = 0;
  if (b_inf) {
    const double span = (s.window->second - g.a) / h;
    cells = static_cast<std::size_t>(std::ceil(span - 1e-9)) + pad_cells;
  } else {
    cells = aligned_index(s.b, g.a, h, "domain end");
  }
  g.n_nodes = cells + 1;
  if (g.n_nodes < 3) throw InputError("domain: fewer than 3 grid nodes at this h");

  std::size_t prev = 0;
  for (double x : s.u0.breakpoints()) {
    if (x <= g.a || x >= g.b()) throw InputError("breakpoint outside the computational domain");
    const auto j = aligned_index(x, g.a, h, "breakpoint");
    if (j < prev + 2) {
      std::ostringstream msg;
      msg << "breakpoint x=" << x << " leaves fewer than 3 nodes in a piece at h=" << h;
      throw InputError(msg.str());
    }
    prev = j;
  }
  if (g.n_nodes - 1 < prev + 2) throw InputError("last piece has fewer than 3 nodes");
  return g;
}

Decomposition decompose(const PiecewiseFn& u0, const Geometry& g) {
  Decomposition d;
  std::size_t first = 0;
  const auto& bps = u0.breakpoints();
  for (std::size_t j = 0; j < bps.size(); ++j) {
    const auto node = aligned_index(bps[j], g.a, g.h, "breakpoint");
    d.intervals.push_back({first, node});
    const auto [left, right] = u0.traces(j);
    JumpRecord rec;
    rec.x = bps[j];
    rec.node = node;
    rec.sign = right > left ? JumpSign::Up : JumpSign::Down;
    rec.J0 = std::abs(right - left);
    d.jumps.push_back(std::move(rec));
    first = node;
  }
  d.intervals.push_back({first, g.n_nodes - 1});
  return d;
}

std::pair<BCTag, BCTag> assign_bcs(JumpSign sign) {
  return sign == JumpSign::Up ? std::pair{BCTag::singular_plus(), BCTag::singular_plus()}
                              : std::pair{BCTag::singular_minus(), BCTag::singular_minus()};
}

double min_persistence(double J0, const HamiltonianBounds& bounds, double T) {
  if (!(J0 > 0.0)) throw InputError("min_persistence: jump magnitude must be positive");
  if (bounds.K > bounds.k) return std::min(J0 / (bounds.K - bounds.k), T);
  return T;
}

std::optional<double> detect_collapse(const JumpRecord& record, double tol_J) {
  for (std::size_t i = 0; i < record.series.size(); ++i) {
    if (record.series[i].J <= tol_J) return collapse_midpoint(record.series, i);
  }
  return std::nullopt;
}

IntervalState merge_intervals(const IntervalState& left, const IntervalState& right,
                              double tol_J) {
  const auto& gl = left.grid;
  const auto& gr = right.grid;
  if (std::abs(gl.h - gr.h) > 1e-12 * gl.h || std::abs(gl.b - gr.a) > 1e-9 * gl.h)
    throw ConsistencyError("merge_intervals: states are not adjacent on a common grid");
  if (left.t != right.t) throw ConsistencyError("merge_intervals: states at different times");
  const double l = left.values.back();
  const double r = right.values.front();
  if (std::abs(r - l) > tol_J) {
    std::ostringstream msg;
    msg << "merge_intervals: trace gap " << std::abs(r - l) << " at x=" << gl.b
        << " exceeds tol_J=" << tol_J;
    throw ConsistencyError(msg.str());
  }
  IntervalState out;
  out.t = left.t;
  out.grid.a = gl.a;
  out.grid.b = gr.b;
  out.grid.h = gl.h;
  out.grid.n = gl.n + gr.n - 1;
  out.grid.bc_left = gl.bc_left;
  out.grid.bc_right = gr.bc_right;
  out.values.reserve(out.grid.n);
  out.values.assign(left.values.begin(), left.values.end() - 1);
  out.values.push_back(0.5 * (l + r));
  out.values.insert(out.values.end(), right.values.begin() + 1, right.values.end());
  return out;
}

std::vector<double> sample_piece(const PiecewiseFn& u0, std::size_t piece, const Geometry& g,
                                 NodeSpan span) {
  std::vector<double> v;
  v.reserve(span.last - span.first + 1);
  for (std::size_t i = span.first; i <= span.last; ++i) v.push_back(u0.piece_value(piece, g.x(i)));
  return v;
}

SnapshotField Solution::field(std::size_t snapshot) const {
  const auto& snap = snapshots.at(snapshot);
  SnapshotField f{std::vector<double>(geometry.n_nodes), std::vector<double>(geometry.n_nodes)};
  for (const auto& sl : snap.slices) {
    for (std::size_t k = 0; k < sl.values.size(); ++k) {
      const std::size_t i = sl.first + k;
      if (k > 0 || i == 0) f.minus[i] = sl.values[k];
      if (k + 1 < sl.values.size() || i + 1 == geometry.n_nodes) f.plus[i] = sl.values[k];
    }
  }
  return f;
}

namespace {

struct Piece {
  NodeSpan span;
  IntervalState state;
};

class Runner {
 public:
  Runner(const Scenario& s, unsigned threads) : s_(s), threads_(std::max(1u, threads)) {}

  Solution operator()() {
    Solution sol;
    sol.scenario_name = s_.name;
    sol.fingerprint = scenario_fingerprint(s_);
    sol.geometry = computational_geometry(s_);
    sol.T = s_.T;
    sol.bounds = compute_bounds(s_.H);
    const double L = sol.bounds.L;
    const double h = sol.geometry.h;
    sol.alpha = s_.numerics.alpha.value_or(L);
    sol.dt = cfl_dt(h, sol.alpha, s_.numerics.cfl);
    sol.record_every = s_.numerics.record_every;
    sol.tol_J = s_.numerics.tol_J.value_or(std::max(10.0 * h * L, 1e-6));
    sol.merge_tol = std::min(sol.tol_J, std::max(0.5 * h * L, 1e-12));

    auto dec = decompose(s_.u0, sol.geometry);
    sol.initial_intervals = dec.intervals;
    sol.jumps = std::move(dec.jumps);
    for (auto& j : sol.jumps) {
      j.t_lower = min_persistence(j.J0, sol.bounds, s_.T);
      j.decay_rate_bound = j.sign == JumpSign::Up ? sol.bounds.A_plus : sol.bounds.A_minus;
    }

    const std::size_t np = sol.initial_intervals.size();
    for (std::size_t k = 0; k < np; ++k) {
      const auto span = sol.initial_intervals[k];
      const BCTag left = k == 0 ? s_.left_bc : assign_bcs(sol.jumps[k - 1].sign).second;
      const BCTag right = k + 1 == np ? s_.right_bc : assign_bcs(sol.jumps[k].sign).first;
      IntervalState st;
      st.grid.a = sol.geometry.x(span.first);
      st.grid.b = sol.geometry.x(span.last);
      st.grid.h = h;
      st.grid.n = span.last - span.first + 1;
      st.grid.bc_left = left;
      st.grid.bc_right = right;
      st.values = sample_piece(s_.u0, k, sol.geometry, span);
      st.t = 0.0;
      pieces_.push_back({span, std::move(st)});
      owner_.push_back(k);
    }
    sol.interval_traces.resize(np);

    record_traces(sol, 0.0);
    sol.snapshots.push_back(snapshot(0.0));

    RecordClock clock(0.0, s_.T, sol.record_every);
    while (!clock.done()) {
      const auto step = clock.next_step(sol.dt);
      advance(step.dt, step.t_after, sol.alpha);
      record_traces(sol, step.t_after);
      if (step.lands_on_record) sol.snapshots.push_back(snapshot(step.t_after));
    }
    return sol;
  }

 private:
  void advance(double dt, double t_after, double alpha) {
    auto work = [&](std::size_t begin, std::size_t stride) {
      for (std::size_t i = begin; i < pieces_.size(); i += stride) {
        auto next = step_interval(pieces_[i].state, dt, s_.H, alpha);
        next.t = t_after;
        pieces_[i].state = std::move(next);
      }
    };
    const std::size_t nthreads = std::min<std::size_t>(threads_, pieces_.size());
    if (nthreads <= 1) {
      work(0, 1);
      return;
    }
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < nthreads; ++w) pool.emplace_back(work, w, nthreads);
    work(0, nthreads);
  }

  double value_at(std::size_t piece, std::size_t node) const {
    const auto& p = pieces_[piece];
    return p.state.values[node - p.span.first];
  }

  void record_traces(Solution& sol, double t) {
    for (std::size_t k = 0; k < sol.initial_intervals.size(); ++k) {
      const auto span = sol.initial_intervals[k];
      sol.interval_traces[k].push_back(
          {t, value_at(owner_[k], span.first), value_at(owner_[k], span.last)});
    }
    for (std::size_t j = 0; j < sol.jumps.size(); ++j) {
      auto& rec = sol.jumps[j];
      const double left = value_at(owner_[j], rec.node);
      const double right = value_at(owner_[j + 1], rec.node);
      rec.series.push_back({t, left, right, std::abs(right - left)});
      if (rec.merged_at) continue;

      const double signed_gap = rec.sign == JumpSign::Up ? right - left : left - right;
      if (!rec.tau && rec.series.back().J <= sol.tol_J)
        rec.tau = collapse_midpoint(rec.series, rec.series.size() - 1);
      if (signed_gap <= sol.merge_tol) {
        if (!rec.tau) rec.tau = collapse_midpoint(rec.series, rec.series.size() - 1);
        merge(sol, j, t, left, right);
      }
    }
  }

  void merge(Solution& sol, std::size_t j, double t, double left, double right) {
    const std::size_t lp = owner_[j];
    const std::size_t rp = owner_[j + 1];
    Piece merged{{pieces_[lp].span.first, pieces_[rp].span.last},
                 merge_intervals(pieces_[lp].state, pieces_[rp].state, sol.tol_J)};
    pieces_[lp] = std::move(merged);
    pieces_.erase(pieces_.begin() + static_cast<std::ptrdiff_t>(rp));
    for (auto& o : owner_) {
      if (o == rp) o = lp;
      else if (o > rp) --o;
    }
    auto& rec = sol.jumps[j];
    rec.merged_at = t;
    const double m = value_at(lp, rec.node);
    sol.merges.push_back({t, j, rec.x, left, right, m});
    rec.series.back() = {t, m, m, 0.0};
  }

  Snapshot snapshot(double t) const {
    Snapshot snap;
    snap.t = t;
    for (const auto& p : pieces_) snap.slices.push_back({p.span.first, p.state.values});
    return snap;
  }

  const Scenario& s_;
  unsigned threads_;
  std::vector<Piece> pieces_;
  std::vector<std::size_t> owner_;  // initial interval -> current piece
};

}  // namespace

Solution run(const Scenario& s, unsigned threads) { return Runner(s, threads)(); }

}  // namespace hjump
