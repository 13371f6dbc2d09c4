#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "hjump/error.hpp"

namespace hjump {

/// Splits [t0, t_end] into CFL-limited steps that land exactly on every
/// record time t0 + m * record_every and on t_end.
class RecordClock {
 public:
  struct Step {
    double dt;
    double t_after;
    bool lands_on_record;
  };

  RecordClock(double t0, double t_end, double record_every)
      : t0_(t0), t_end_(t_end), every_(record_every), t_(t0) {
    if (!(record_every > 0.0) || !std::isfinite(record_every))
      throw InputError("record_every must be positive and finite");
  }

  bool done() const { return t_ >= t_end_; }
  double now() const { return t_; }

  Step next_step(double dt_max) {
    const double target = std::min(t_end_, t0_ + every_ * static_cast<double>(m_ + 1));
    Step s{};
    if (t_ + dt_max >= target - 1e-12 * every_) {
      s.dt = target - t_;
      s.t_after = target;
      s.lands_on_record = true;
      ++m_;
    } else {
      s.dt = dt_max;
      s.t_after = t_ + dt_max;
      s.lands_on_record = false;
    }
    t_ = s.t_after;
    return s;
  }

 private:
  double t0_, t_end_, every_;
  double t_;
  std::size_t m_ = 0;
};

}  // namespace hjump
