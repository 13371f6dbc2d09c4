#include "hjump/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjump/error.hpp"

namespace hjump {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double clamp_unit(double p) { return std::max(-1.0, std::min(1.0, p)); }

double table_eval(const TableH& t, double p) {
  const auto n = t.values.size();
  const double s = (p - t.xi_min) / t.spacing;
  if (s <= 0.0) return t.values.front();
  if (s >= static_cast<double>(n - 1)) return t.values.back();
  const auto i = static_cast<std::size_t>(s);
  const double w = s - static_cast<double>(i);
  if (i + 1 >= n) return t.values.back();
  return (1.0 - w) * t.values[i] + w * t.values[i + 1];
}

double table_extremal(const TableH& t, Extremum kind, HalfLine side, double p) {
  const auto n = static_cast<long>(t.values.size());
  const bool sup = kind == Extremum::Sup;
  double best = table_eval(t, p);
  auto take = [&](double v) { best = sup ? std::max(best, v) : std::min(best, v); };
  const double s = (p - t.xi_min) / t.spacing;

  if (side == HalfLine::Geq) {
    const long first = std::max(0L, static_cast<long>(std::ceil(s)));
    if (first < n) take(sup ? t.suffix_max[first] : t.suffix_min[first]);
    take(sup ? t.tails.limsup_plus : t.tails.liminf_plus);
  } else {
    const long last = std::min(n - 1, static_cast<long>(std::floor(s)));
    if (last >= 0) take(sup ? t.prefix_max[last] : t.prefix_min[last]);
    take(sup ? t.tails.limsup_minus : t.tails.liminf_minus);
  }
  return best;
}

}  // namespace

HamiltonianSpec HamiltonianSpec::constant(double c) {
  if (!std::isfinite(c)) throw InputError("constant Hamiltonian: value must be finite");
  return HamiltonianSpec(ConstantH{c});
}
HamiltonianSpec HamiltonianSpec::sine() { return HamiltonianSpec(SinH{}); }
HamiltonianSpec HamiltonianSpec::tanh() { return HamiltonianSpec(TanhH{}); }
HamiltonianSpec HamiltonianSpec::clamp() { return HamiltonianSpec(ClampH{}); }

HamiltonianSpec HamiltonianSpec::table(const std::vector<std::pair<double, double>>& samples,
                                       const TailDescriptors& tails, double lip) {
  if (samples.size() < 2) throw InputError("table Hamiltonian: need at least two samples");
  if (!std::isfinite(lip) || lip < 0.0)
    throw InputError("table Hamiltonian: lip must be finite and >= 0");

  TableH t;
  t.xi_min = samples.front().first;
  t.spacing = samples[1].first - samples[0].first;
  if (!(t.spacing > 0.0) || !std::isfinite(t.spacing))
    throw InputError("table Hamiltonian: sample abscissae must be strictly increasing");
  t.values.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [xi, hv] = samples[i];
    if (!std::isfinite(xi) || !std::isfinite(hv)) {
      std::ostringstream msg;
      msg << "table Hamiltonian: sample " << i << " is not finite";
      throw InputError(msg.str());
    }
    const double expected = t.xi_min + t.spacing * static_cast<double>(i);
    if (std::abs(xi - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      std::ostringstream msg;
      msg << "table Hamiltonian: sample " << i << " breaks uniform spacing (xi=" << xi
          << ", expected " << expected << ")";
      throw InputError(msg.str());
    }
    if (i > 0) {
      const double slope = std::abs(hv - t.values.back()) / t.spacing;
      if (slope > lip * (1.0 + 1e-9) + 1e-12) {
        std::ostringstream msg;
        msg << "table Hamiltonian: samples " << i - 1 << "," << i << " have slope " << slope
            << " exceeding lip=" << lip;
        throw InputError(msg.str());
      }
    }
    t.values.push_back(hv);
  }

  const auto [lo_it, hi_it] = std::minmax_element(t.values.begin(), t.values.end());
  const double slack = lip * t.spacing + 1e-12;
  const double lo = *lo_it - slack;
  const double hi = *hi_it + slack;
  auto check_pair = [&](double sup, double inf, const char* side) {
    if (!std::isfinite(sup) || !std::isfinite(inf))
      throw InputError(std::string("table Hamiltonian: tail descriptors at ") + side +
                       " must be finite");
    if (inf > sup)
      throw InputError(std::string("table Hamiltonian: liminf > limsup at ") + side);
    if (inf < lo || sup > hi)
      throw InputError(std::string("table Hamiltonian: tail descriptors at ") + side +
                       " lie outside the sampled range");
  };
  check_pair(tails.limsup_plus, tails.liminf_plus, "+inf");
  check_pair(tails.limsup_minus, tails.liminf_minus, "-inf");
  t.tails = tails;
  t.lip = lip;

  const auto n = t.values.size();
  t.prefix_max.resize(n);
  t.prefix_min.resize(n);
  t.suffix_max.resize(n);
  t.suffix_min.resize(n);
  t.prefix_max[0] = t.prefix_min[0] = t.values[0];
  for (std::size_t i = 1; i < n; ++i) {
    t.prefix_max[i] = std::max(t.prefix_max[i - 1], t.values[i]);
    t.prefix_min[i] = std::min(t.prefix_min[i - 1], t.values[i]);
  }
  t.suffix_max[n - 1] = t.suffix_min[n - 1] = t.values[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    t.suffix_max[i] = std::max(t.suffix_max[i + 1], t.values[i]);
    t.suffix_min[i] = std::min(t.suffix_min[i + 1], t.values[i]);
  }
  return HamiltonianSpec(std::move(t));
}

std::string HamiltonianSpec::name() const {
  return std::visit(overloaded{[](const ConstantH&) { return std::string("constant"); },
                               [](const SinH&) { return std::string("sin"); },
                               [](const TanhH&) { return std::string("tanh"); },
                               [](const ClampH&) { return std::string("clamp"); },
                               [](const TableH&) { return std::string("table"); }},
                    kind_);
}

double HamiltonianSpec::lipschitz() const {
  return std::visit(overloaded{[](const ConstantH&) { return 0.0; },
                               [](const SinH&) { return 1.0; },
                               [](const TanhH&) { return 1.0; },
                               [](const ClampH&) { return 1.0; },
                               [](const TableH& t) { return t.lip; }},
                    kind_);
}

TailDescriptors HamiltonianSpec::tails() const {
  return std::visit(overloaded{[](const ConstantH& c) {
                                 return TailDescriptors{c.c, c.c, c.c, c.c};
                               },
                               [](const SinH&) { return TailDescriptors{1.0, -1.0, 1.0, -1.0}; },
                               [](const TanhH&) { return TailDescriptors{1.0, 1.0, -1.0, -1.0}; },
                               [](const ClampH&) { return TailDescriptors{1.0, 1.0, -1.0, -1.0}; },
                               [](const TableH& t) { return t.tails; }},
                    kind_);
}

double eval(const HamiltonianSpec& H, double p) {
  if (!std::isfinite(p)) throw InputError("eval: slope argument is not finite");
  return std::visit(overloaded{[](const ConstantH& c) { return c.c; },
                               [p](const SinH&) { return std::sin(p); },
                               [p](const TanhH&) { return std::tanh(p); },
                               [p](const ClampH&) { return clamp_unit(p); },
                               [p](const TableH& t) { return table_eval(t, p); }},
                    H.kind());
}

HamiltonianBounds compute_bounds(const HamiltonianSpec& H) {
  HamiltonianBounds b;
  b.L = H.lipschitz();
  const TailDescriptors tails = H.tails();
  b.A_plus = tails.limsup_plus - tails.liminf_plus;
  b.A_minus = tails.limsup_minus - tails.liminf_minus;

  std::visit(overloaded{[&](const ConstantH& c) {
                          b.K = -c.c;
                          b.k = -c.c;
                        },
                        [&](const TableH& t) {
                          double lo = std::min({t.tails.liminf_plus, t.tails.liminf_minus,
                                                t.prefix_min.back()});
                          double hi = std::max({t.tails.limsup_plus, t.tails.limsup_minus,
                                                t.prefix_max.back()});
                          b.K = -lo;
                          b.k = -hi;
                        },
                        [&](const auto&) {
                          // sin, tanh, clamp all have range [-1, 1] (sup/inf)
                          b.K = 1.0;
                          b.k = -1.0;
                        }},
             H.kind());
  return b;
}

double extremal(const HamiltonianSpec& H, Extremum kind, HalfLine side, double p) {
  if (!std::isfinite(p)) throw InputError("extremal: slope argument is not finite");
  const bool sup = kind == Extremum::Sup;
  const bool geq = side == HalfLine::Geq;
  return std::visit(
      overloaded{[](const ConstantH& c) { return c.c; },
                 [sup](const SinH&) { return sup ? 1.0 : -1.0; },
                 [&](const TanhH&) {
                   // increasing with limits -1, +1
                   if (geq) return sup ? 1.0 : std::tanh(p);
                   return sup ? std::tanh(p) : -1.0;
                 },
                 [&](const ClampH&) {
                   if (geq) return sup ? 1.0 : clamp_unit(p);
                   return sup ? clamp_unit(p) : -1.0;
                 },
                 [&](const TableH& t) { return table_extremal(t, kind, side, p); }},
      H.kind());
}

double boundary_hamiltonian(Endpoint endpoint, SingularSign sign, double p,
                            const HamiltonianSpec& H) {
  const bool plus = sign == SingularSign::Plus;
  if (endpoint == Endpoint::Left) {
    return plus ? extremal(H, Extremum::Sup, HalfLine::Geq, p)
                : extremal(H, Extremum::Inf, HalfLine::Leq, p);
  }
  return plus ? extremal(H, Extremum::Inf, HalfLine::Geq, p)
              : extremal(H, Extremum::Sup, HalfLine::Leq, p);
}

}  // namespace hjump
