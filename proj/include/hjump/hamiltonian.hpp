#pragma once

#include <string>
#include <variant>
#include <vector>

namespace hjump {

/// Asymptotic range information of H at +inf and -inf.
struct TailDescriptors {
  double limsup_plus = 0.0;
  double liminf_plus = 0.0;
  double limsup_minus = 0.0;
  double liminf_minus = 0.0;
};

struct ConstantH {
  double c = 0.0;
};
struct SinH {};
struct TanhH {};
struct ClampH {};

/// Uniformly sampled H on [xi_min, xi_min + spacing*(n-1)], linearly
/// interpolated inside and clamped to the end values outside.
struct TableH {
  double xi_min = 0.0;
  double spacing = 1.0;
  std::vector<double> values;
  TailDescriptors tails;
  double lip = 0.0;

  // prefix/suffix extrema over the samples, filled by make_table
  std::vector<double> prefix_max, prefix_min, suffix_max, suffix_min;
};

/// A bounded Lipschitz Hamiltonian H(p). Immutable once built.
class HamiltonianSpec {
 public:
  using Kind = std::variant<ConstantH, SinH, TanhH, ClampH, TableH>;

  static HamiltonianSpec constant(double c);
  static HamiltonianSpec sine();
  static HamiltonianSpec tanh();
  static HamiltonianSpec clamp();

  /// Validates the samples and tail descriptors and precomputes the
  /// extremum tables. `samples` are (xi, H(xi)) pairs with uniform xi.
  static HamiltonianSpec table(const std::vector<std::pair<double, double>>& samples,
                               const TailDescriptors& tails, double lip);

  const Kind& kind() const { return kind_; }
  std::string name() const;

  /// ||H'||_inf
  double lipschitz() const;
  TailDescriptors tails() const;

 private:
  explicit HamiltonianSpec(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// K = sup(-H), k = inf(-H), A_plus/A_minus = oscillation of H at +/-inf.
struct HamiltonianBounds {
  double K = 0.0;
  double k = 0.0;
  double A_plus = 0.0;
  double A_minus = 0.0;
  double L = 0.0;
};

enum class Extremum { Sup, Inf };
enum class HalfLine { Geq, Leq };
enum class Endpoint { Left, Right };
enum class SingularSign { Plus, Minus };

double eval(const HamiltonianSpec& H, double p);

HamiltonianBounds compute_bounds(const HamiltonianSpec& H);

/// sup or inf of H over {xi >= p} or {xi <= p}, tail descriptors included.
double extremal(const HamiltonianSpec& H, Extremum kind, HalfLine side, double p);

/// Effective Hamiltonian at an endpoint carrying u_x = +inf or -inf, given
/// the one-sided interior slope p. The boundary node evolves by
/// du/dt = -B(p).
///
///   left,  +inf : sup{H(xi) : xi >= p}
///   left,  -inf : inf{H(xi) : xi <= p}
///   right, +inf : inf{H(xi) : xi >= p}
///   right, -inf : sup{H(xi) : xi <= p}
double boundary_hamiltonian(Endpoint endpoint, SingularSign sign, double p,
                            const HamiltonianSpec& H);

}  // namespace hjump
