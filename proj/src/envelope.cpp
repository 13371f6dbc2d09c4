#include "hjump/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <type_traits>

#include "hjump/error.hpp"

namespace hjump {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sampled_value(const SampledSegment& s, double lo, double hi, double x) {
  const auto n = s.values.size();
  const double pos = (x - lo) / (hi - lo) * static_cast<double>(n - 1);
  if (pos <= 0.0) return s.values.front();
  if (pos >= static_cast<double>(n - 1)) return s.values.back();
  const auto i = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * s.values[i] + w * s.values[i + 1];
}

}  // namespace

double Bump::operator()(double x) const {
  return amplitude * std::max(0.0, 1.0 - std::abs(x - center) / half_width);
}

PiecewiseFn::PiecewiseFn(double lo, double hi, std::vector<double> breakpoints,
                         std::vector<Segment> segments)
    : lo_(lo), hi_(hi), breakpoints_(std::move(breakpoints)), segments_(std::move(segments)) {
  if (!(lo_ < hi_)) throw InputError("initial data: domain must satisfy lo < hi");
  if (segments_.size() != breakpoints_.size() + 1) {
    std::ostringstream msg;
    msg << "initial data: " << breakpoints_.size() << " breakpoints need "
        << breakpoints_.size() + 1 << " segments, got " << segments_.size();
    throw InputError(msg.str());
  }
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    const double x = breakpoints_[j];
    if (!std::isfinite(x) || x <= lo_ || x >= hi_) {
      std::ostringstream msg;
      msg << "initial data: breakpoint " << j << " (x=" << x << ") is not interior to the domain";
      throw InputError(msg.str());
    }
    if (j > 0 && x <= breakpoints_[j - 1])
      throw InputError("initial data: breakpoints must be strictly increasing");
  }
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto [a, b] = piece_bounds(k);
    for (const auto& bump : segments_[k].bumps) {
      if (!(bump.half_width > 0.0) || !std::isfinite(bump.amplitude))
        throw InputError("initial data: bump needs half_width > 0 and finite amplitude");
    }
    if (const auto* s = std::get_if<SampledSegment>(&segments_[k].form)) {
      if (!std::isfinite(a) || !std::isfinite(b)) {
        std::ostringstream msg;
        msg << "initial data: segment " << k << " is sampled but its interval is unbounded";
        throw InputError(msg.str());
      }
      if (s->values.size() < 2) {
        std::ostringstream msg;
        msg << "initial data: sampled segment " << k << " needs at least two values";
        throw InputError(msg.str());
      }
      for (std::size_t i = 0; i < s->values.size(); ++i) {
        if (!std::isfinite(s->values[i]))
          throw InputError("initial data: sampled segment has a non-finite value");
        if (i > 0 && std::abs(s->values[i] - s->values[i - 1]) > s->modulus) {
          std::ostringstream msg;
          msg << "initial data: sampled segment " << k << " exceeds its continuity modulus "
              << s->modulus << " between samples " << i - 1 << " and " << i;
          throw InputError(msg.str());
        }
      }
    }
  }
  traces_.reserve(breakpoints_.size());
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    const double x = breakpoints_[j];
    const double left = piece_value(j, x);
    const double right = piece_value(j + 1, x);
    if (!std::isfinite(left) || !std::isfinite(right))
      throw InputError("initial data: non-finite trace at a breakpoint");
    if (left == right) {
      std::ostringstream msg;
      msg << "initial data: breakpoint " << j << " (x=" << x << ") has equal one-sided traces "
          << left << "; a listed breakpoint must be a jump discontinuity";
      throw InputError(msg.str());
    }
    traces_.emplace_back(left, right);
  }
}

PiecewiseFn PiecewiseFn::continuous(double lo, double hi, Segment s) {
  return PiecewiseFn(lo, hi, {}, {std::move(s)});
}

std::pair<double, double> PiecewiseFn::piece_bounds(std::size_t piece) const {
  const double a = piece == 0 ? lo_ : breakpoints_[piece - 1];
  const double b = piece == breakpoints_.size() ? hi_ : breakpoints_[piece];
  return {a, b};
}

double PiecewiseFn::piece_value(std::size_t piece, double x) const {
  const Segment& seg = segments_.at(piece);
  double v = std::visit(
      overloaded{[](const ConstantSegment& c) { return c.value; },
                 [x](const AffineSegment& a) { return a.slope * x + a.intercept; },
                 [x](const SineSegment& s) {
                   return s.amplitude * std::sin(s.frequency * x + s.phase) + s.offset;
                 },
                 [&](const SampledSegment& s) {
                   const auto [a, b] = piece_bounds(piece);
                   return sampled_value(s, a, b, x);
                 }},
      seg.form);
  for (const auto& bump : seg.bumps) v += bump(x);
  return v;
}

std::size_t PiecewiseFn::piece_of(double x) const {
  return static_cast<std::size_t>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) -
                                  breakpoints_.begin());
}

PiecewiseFn PiecewiseFn::with_bump(const Bump& b) const {
  auto segs = segments_;
  for (auto& s : segs) s.bumps.push_back(b);
  return PiecewiseFn(lo_, hi_, breakpoints_, std::move(segs));
}

PiecewiseFn PiecewiseFn::shifted(double c) const {
  auto segs = segments_;
  for (auto& s : segs) {
    std::visit(
        [c](auto& f) {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, ConstantSegment>) f.value += c;
          else if constexpr (std::is_same_v<F, AffineSegment>) f.intercept += c;
          else if constexpr (std::is_same_v<F, SineSegment>) f.offset += c;
          else for (auto& v : f.values) v += c;
        },
        s.form);
  }
  return PiecewiseFn(lo_, hi_, breakpoints_, std::move(segs));
}

std::pair<double, double> one_sided_limits(const PiecewiseFn& f, double c) {
  if (!std::isfinite(c) || c <= f.lo() || c >= f.hi()) {
    std::ostringstream msg;
    msg << "one_sided_limits: point " << c << " is outside the domain interior";
    throw InputError(msg.str());
  }
  const auto& bp = f.breakpoints();
  const auto it = std::find(bp.begin(), bp.end(), c);
  if (it != bp.end()) return f.traces(static_cast<std::size_t>(it - bp.begin()));
  const double v = f.piece_value(f.piece_of(c), c);
  return {v, v};
}

GridFn GridFn::restrict_to(std::size_t first, std::size_t last) const {
  if (first > last || last >= values.size())
    throw InputError("GridFn::restrict_to: invalid node range");
  GridFn out;
  out.a = x(first);
  out.h = h;
  out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(first),
                    values.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  return out;
}

EnvelopePair essential_envelopes(const GridFn& z, const std::vector<std::size_t>& exceptional_nodes) {
  const std::size_t n = z.size();
  std::vector<bool> exceptional(n, false);
  for (auto i : exceptional_nodes) {
    if (i >= n) throw InputError("essential_envelopes: exceptional node index out of range");
    exceptional[i] = true;
  }
  EnvelopePair env{GridFn{z.a, z.h, std::vector<double>(n)}, GridFn{z.a, z.h, std::vector<double>(n)}};
  for (std::size_t i = 0; i < n; ++i) {
    if (!exceptional[i]) {
      env.upper.values[i] = z.values[i];
      env.lower.values[i] = z.values[i];
      continue;
    }
    bool found = false;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t j : {i - 1, i + 1}) {
      if (j >= n || exceptional[j]) continue;  // i - 1 wraps when i == 0
      found = true;
      hi = std::max(hi, z.values[j]);
      lo = std::min(lo, z.values[j]);
    }
    if (!found) {
      std::ostringstream msg;
      msg << "essential_envelopes: node " << i << " has no non-exceptional stencil neighbour";
      throw InputError(msg.str());
    }
    env.upper.values[i] = hi;
    env.lower.values[i] = lo;
  }
  return env;
}

double IdempotenceReport::max_deviation() const {
  return std::max({upper_of_upper, upper_of_lower, lower_of_upper, lower_of_lower});
}

IdempotenceReport envelope_idempotence(const GridFn& z,
                                       const std::vector<std::size_t>& exceptional_nodes) {
  const auto env = essential_envelopes(z, exceptional_nodes);
  const auto of_upper = essential_envelopes(env.upper, exceptional_nodes);
  const auto of_lower = essential_envelopes(env.lower, exceptional_nodes);
  auto dev = [](const GridFn& a, const GridFn& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
  };
  IdempotenceReport r;
  r.upper_of_upper = dev(of_upper.upper, env.upper);
  r.upper_of_lower = dev(of_lower.upper, env.upper);
  r.lower_of_upper = dev(of_upper.lower, env.lower);
  r.lower_of_lower = dev(of_lower.lower, env.lower);
  return r;
}

}  // namespace hjump
