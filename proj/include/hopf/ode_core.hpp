#pragma once

// Problem data and residual evaluators for the reduced harmonic Hopf ODE
//
//   a'' + (p cot t - q tan t) a' - (lambda/sin^2 t + mu/cos^2 t) sin a cos a = 0,
//   a(0+) = 0,  a(pi/2-) = pi,
//
// in its original, flux ((f a')' = f Q sin a cos a), rescaled and limit forms.

#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace hopf {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// Bi-eigenvalue problem data (p, q, lambda, mu) plus cached derived constants.
struct HopfParams {
  int p = 1;
  int q = 1;
  double lambda = 1.0;
  double mu = 1.0;
  double a = 2.0;   // 2 sqrt(lambda)
  double r0 = 1.0;  // t^r0 behaviour at t = 0
  double r1 = 1.0;  // (pi/2 - t)^r1 behaviour at t = pi/2

  /// Validates p, q >= 1 and lambda, mu > 0; throws std::invalid_argument.
  static HopfParams make(int p, int q, double lambda, double mu);

  /// The reflection t -> pi/2 - t, a -> pi - a swaps (p, lambda) with (q, mu).
  HopfParams mirrored() const { return make(q, p, mu, lambda); }

  /// Existence is only established for lambda >= 1.
  bool outside_proven_regime() const { return lambda < 1.0; }

  /// p = 1, q > 1, lambda >= 1, mu > lambda q.
  bool in_theorem_regime() const {
    return p == 1 && q > 1 && lambda >= 1.0 && mu > lambda * q;
  }
};

struct IndicialExponents {
  double r0;
  double r1;
};

/// Positive root of r^2 + (dim - 1) r - eigenvalue = 0.
double indicial_root(int dim, double eigenvalue);
IndicialExponents indicial_exponents(const HopfParams& params);

/// Q(t) = lambda/sin^2 t + mu/cos^2 t. Throws DomainError unless 0 < t < pi/2.
double coeff_Q(double t, const HopfParams& params);
/// f(t) = sin^p t cos^q t, total on [0, pi/2].
double weight_f(double t, const HopfParams& params);
/// p cot t - q tan t.
double drift(double t, const HopfParams& params);

struct Cluster {
  double center;  // at or outside the grid interval
  double width;   // log-grading cut-off; 0 means geometric down to the interval end
  double weight;
};

/// Strictly increasing node sequence. The admissible range ((0, pi/2) for the
/// original ODE, (0, inf) for the limit equation) is checked by each operator.
class Grid {
 public:
  explicit Grid(std::vector<double> nodes, double grading = 1.0,
                std::optional<std::size_t> junction = std::nullopt);

  static Grid uniform(double a, double b, std::size_t n);
  /// Two-sided polynomial grading: t = a + (b-a) x^g / (x^g + (1-x)^g).
  static Grid graded(double a, double b, std::size_t n, double exponent = 2.0);
  /// Node density bulk/(b-a) + sum_k weight_k / (|t - center_k| + width_k),
  /// i.e. uniform spacing in the bulk and geometric spacing near each cluster.
  static Grid clustered(double a, double b, std::size_t n, double bulk,
                        std::span<const Cluster> clusters);
  /// Concatenates two grids sharing an end node; the shared node becomes the junction.
  static Grid join(const Grid& left, const Grid& right);

  std::span<const double> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  double front() const { return nodes_.front(); }
  double back() const { return nodes_.back(); }
  double grading() const { return grading_; }
  std::optional<std::size_t> junction() const { return junction_; }

  /// Throws DomainError if any node lies outside (0, upper).
  void require_inside(double upper) const;

 private:
  std::vector<double> nodes_;
  double grading_;
  std::optional<std::size_t> junction_;
};

/// One-sided derivatives at the junction node.
struct JunctionSlopes {
  double left;   // a'(s - 0)
  double right;  // a'(s + 0)
};

/// Angle values over a grid. Slopes are optional (filled by integrators that
/// carry a'); otherwise derivatives come from finite differences.
class Profile {
 public:
  Profile(Grid grid, std::vector<double> values, std::vector<double> slopes = {},
          std::optional<JunctionSlopes> junction = std::nullopt);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> slopes() const { return slopes_; }
  std::optional<JunctionSlopes> junction() const { return junction_; }
  std::size_t size() const { return values_.size(); }

  bool within_closed_range() const;  // every value in [0, pi]
  bool strictly_increasing() const;

  /// Piecewise-linear interpolation; throws DomainError outside the grid.
  double operator()(double t) const;
  /// Stored slopes, or three-point finite differences (one-sided at the ends,
  /// the mean of the junction slopes at the junction).
  std::vector<double> derivative() const;

 private:
  Grid grid_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  std::optional<JunctionSlopes> junction_;
};

namespace fd {
/// Three-point derivative weights on a nonuniform stencil t0 < t1 < t2, evaluated at t1.
double first_central(double h0, double h1, double y0, double y1, double y2);
double second_central(double h0, double h1, double y0, double y1, double y2);
/// Derivative at the last of three nodes (backward) or the first (forward);
/// h_near is the spacing adjacent to the evaluation node.
double first_backward(double h_near, double h_far, double y_far, double y_mid, double y_end);
double first_forward(double h_near, double h_far, double y_end, double y_mid, double y_far);
}  // namespace fd

/// Second-order FD residual of the ODE at interior nodes; with stored slopes,
/// a' is taken from them and a'' is their central difference. Entries that are not
/// evaluated (the two end nodes, and the junction when the profile carries
/// junction slopes) are NaN.
std::vector<double> residual(const Profile& profile, const HopfParams& params);
/// (f a')' - f Q sin a cos a in conservative form with midpoint weights.
std::vector<double> flux_residual(const Profile& profile, const HopfParams& params);
/// a'' + a'/t - lambda/t^2 sin a cos a on a positive grid.
std::vector<double> limit_residual(const Profile& profile, double lambda);
/// Residual of the rescaled ODE for gamma(t) = a(st); requires s t in (0, pi/2).
std::vector<double> rescaled_residual(const Profile& profile, double s,
                                      const HopfParams& params);

/// Operators applied to exact derivative data at a point.
double ode_operator(double t, double value, double d1, double d2, const HopfParams& params);
double limit_operator(double t, double value, double d1, double d2, double lambda);

/// Maximum absolute value, skipping NaN entries; 0 for an all-NaN input.
double max_abs(std::span<const double> values);

/// CSV with header `t,alpha,dalpha,residual`, 17 significant digits.
void write_profile_csv(std::ostream& out, const Profile& profile, const HopfParams& params);
/// Reads the `t,alpha,...` layout; dalpha (when present) becomes the profile slopes.
Profile read_profile_csv(std::istream& in);

}  // namespace hopf
