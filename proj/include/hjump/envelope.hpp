#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

namespace hjump {

// ---------------------------------------------------------------------------
// Piecewise-continuous initial data
// ---------------------------------------------------------------------------

struct ConstantSegment {
  double value = 0.0;
};

/// slope * x + intercept
struct AffineSegment {
  double slope = 0.0;
  double intercept = 0.0;
};

/// amplitude * sin(frequency * x + phase) + offset
struct SineSegment {
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
  double offset = 0.0;
};

/// Uniform samples over the closure of the segment's interval, linearly
/// interpolated. Adjacent samples may differ by at most `modulus`.
struct SampledSegment {
  std::vector<double> values;
  double modulus = std::numeric_limits<double>::infinity();
};

/// Tent bump amplitude * max(0, 1 - |x - center| / half_width).
struct Bump {
  double center = 0.0;
  double half_width = 1.0;
  double amplitude = 0.0;

  double operator()(double x) const;
};

struct Segment {
  std::variant<ConstantSegment, AffineSegment, SineSegment, SampledSegment> form;
  std::vector<Bump> bumps;
};

/// A function on (lo, hi) that is continuous on the closure of each piece
/// between consecutive breakpoints and jumps at every breakpoint.
class PiecewiseFn {
 public:
  /// Validates ordering, segment count, sampled-segment continuity and that
  /// every breakpoint is a genuine jump. `lo`/`hi` may be infinite.
  PiecewiseFn(double lo, double hi, std::vector<double> breakpoints,
              std::vector<Segment> segments);

  static PiecewiseFn continuous(double lo, double hi, Segment s);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t piece_count() const { return segments_.size(); }

  /// (f(x_j-), f(x_j+)) for breakpoint j.
  std::pair<double, double> traces(std::size_t j) const { return traces_[j]; }

  /// Value of the continuous representative of piece `piece` at x, where x
  /// lies in the closure of that piece.
  double piece_value(std::size_t piece, double x) const;

  /// Piece containing x; breakpoints belong to the piece on their right.
  std::size_t piece_of(double x) const;

  /// Returns a copy with `b` added to every piece.
  PiecewiseFn with_bump(const Bump& b) const;
  /// Returns a copy with the constant c added everywhere.
  PiecewiseFn shifted(double c) const;

  std::pair<double, double> piece_bounds(std::size_t piece) const;

 private:
  double lo_, hi_;
  std::vector<double> breakpoints_;
  std::vector<Segment> segments_;
  std::vector<std::pair<double, double>> traces_;
};

/// (f(c-), f(c+)). Equal unless c is a breakpoint.
std::pair<double, double> one_sided_limits(const PiecewiseFn& f, double c);

// ---------------------------------------------------------------------------
// Discrete essential envelopes
// ---------------------------------------------------------------------------

struct GridFn {
  double a = 0.0;
  double h = 1.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double x(std::size_t i) const { return a + h * static_cast<double>(i); }
  /// Nodes first..last inclusive.
  GridFn restrict_to(std::size_t first, std::size_t last) const;
};

struct EnvelopePair {
  GridFn upper;
  GridFn lower;
};

/// Discrete z* and z_*. A non-exceptional node carries positive mass, so its
/// own value is its envelope; an exceptional node is a null modification and
/// takes the max/min over its non-exceptional stencil neighbours.
/// Throws InputError when a node and both neighbours are exceptional.
EnvelopePair essential_envelopes(const GridFn& z,
                                 const std::vector<std::size_t>& exceptional_nodes = {});

struct IdempotenceReport {
  double upper_of_upper = 0.0;  // |(z*)* - z*|
  double upper_of_lower = 0.0;  // |(z_*)* - z*|
  double lower_of_upper = 0.0;  // |(z*)_* - z_*|
  double lower_of_lower = 0.0;  // |(z_*)_* - z_*|

  double max_deviation() const;
};

IdempotenceReport envelope_idempotence(const GridFn& z,
                                       const std::vector<std::size_t>& exceptional_nodes = {});

}  // namespace hjump
