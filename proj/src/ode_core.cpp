#include "hopf/ode_core.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "hopf/errors.hpp"

namespace hopf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_open_quarter(double t, const char* what) {
  if (!(t > 0.0 && t < kHalfPi)) {
    throw DomainError(fmt::format("{}: t = {} outside (0, pi/2)", what, t));
  }
}

// Generic second-order evaluator of a'' + b(t) a' - c(t) sin a cos a.
template <class Drift, class Force>
std::vector<double> second_order_residual(const Profile& profile, Drift&& b, Force&& c) {
  const auto t = profile.grid().nodes();
  const auto y = profile.values();
  const auto slopes = profile.slopes();
  const std::size_t n = t.size();
  if (n < 3) throw std::invalid_argument("residual needs at least 3 nodes");
  std::vector<double> r(n, kNaN);
  const auto skip = profile.junction() ? profile.grid().junction() : std::nullopt;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (skip && *skip == i) continue;
    const double h0 = t[i] - t[i - 1];
    const double h1 = t[i + 1] - t[i];
    double d1 = 0.0;
    double d2 = 0.0;
    if (slopes.empty()) {
      d1 = fd::first_central(h0, h1, y[i - 1], y[i], y[i + 1]);
      d2 = fd::second_central(h0, h1, y[i - 1], y[i], y[i + 1]);
    } else {
      d1 = slopes[i];
      d2 = fd::first_central(h0, h1, slopes[i - 1], slopes[i], slopes[i + 1]);
    }
    r[i] = d2 + b(t[i]) * d1 - c(t[i]) * std::sin(y[i]) * std::cos(y[i]);
  }
  return r;
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

HopfParams HopfParams::make(int p, int q, double lambda, double mu) {
  if (p < 1 || q < 1) throw std::invalid_argument("p and q must be >= 1");
  if (!(lambda > 0.0) || !(mu > 0.0) || !std::isfinite(lambda) || !std::isfinite(mu)) {
    throw std::invalid_argument("lambda and mu must be finite and > 0");
  }
  HopfParams hp;
  hp.p = p;
  hp.q = q;
  hp.lambda = lambda;
  hp.mu = mu;
  hp.a = 2.0 * std::sqrt(lambda);
  hp.r0 = indicial_root(p, lambda);
  hp.r1 = indicial_root(q, mu);
  return hp;
}

double indicial_root(int dim, double eigenvalue) {
  const double b = dim - 1.0;
  return 0.5 * (-b + std::sqrt(b * b + 4.0 * eigenvalue));
}

IndicialExponents indicial_exponents(const HopfParams& params) {
  return {indicial_root(params.p, params.lambda), indicial_root(params.q, params.mu)};
}

double coeff_Q(double t, const HopfParams& params) {
  require_open_quarter(t, "coeff_Q");
  const double s = std::sin(t);
  const double c = std::cos(t);
  return params.lambda / (s * s) + params.mu / (c * c);
}

double weight_f(double t, const HopfParams& params) {
  if (!(t >= 0.0 && t <= kHalfPi)) {
    throw DomainError(fmt::format("weight_f: t = {} outside [0, pi/2]", t));
  }
  // cos(pi/2) is ~6e-17 in floating point; snap the endpoint zeros.
  if (t == 0.0 || t == kHalfPi) return 0.0;
  return std::pow(std::sin(t), params.p) * std::pow(std::cos(t), params.q);
}

double drift(double t, const HopfParams& params) {
  require_open_quarter(t, "drift");
  return params.p / std::tan(t) - params.q * std::tan(t);
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(std::vector<double> nodes, double grading, std::optional<std::size_t> junction)
    : nodes_(std::move(nodes)), grading_(grading), junction_(junction) {
  if (nodes_.size() < 2) throw std::invalid_argument("grid needs at least 2 nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i])) throw std::invalid_argument("grid node not finite");
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
      throw std::invalid_argument(fmt::format("grid not strictly increasing at index {}", i));
    }
  }
  if (grading_ < 1.0) throw std::invalid_argument("grading exponent must be >= 1");
  if (junction_ && *junction_ >= nodes_.size()) {
    throw std::invalid_argument("junction index out of range");
  }
}

Grid Grid::uniform(double a, double b, std::size_t n) {
  if (n < 2 || !(b > a)) throw std::invalid_argument("uniform grid needs n >= 2 and b > a");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  t.back() = b;
  return Grid(std::move(t));
}

Grid Grid::graded(double a, double b, std::size_t n, double exponent) {
  if (n < 2 || !(b > a)) throw std::invalid_argument("graded grid needs n >= 2 and b > a");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    const double u = std::pow(x, exponent);
    const double v = std::pow(1.0 - x, exponent);
    t[i] = a + (b - a) * u / (u + v);
  }
  t.front() = a;
  t.back() = b;
  return Grid(std::move(t), exponent);
}

Grid Grid::clustered(double a, double b, std::size_t n, double bulk,
                     std::span<const Cluster> clusters) {
  if (n < 2 || !(b > a)) throw std::invalid_argument("clustered grid needs n >= 2 and b > a");
  struct Term {
    double center, width, weight, sign, log_a, span;
  };
  std::vector<Term> terms;
  double total = bulk;
  for (const auto& c : clusters) {
    if (c.weight <= 0.0) continue;
    Term term{c.center, c.width, c.weight, 0.0, 0.0, 0.0};
    if (c.center <= a) {
      term.sign = 1.0;
    } else if (c.center >= b) {
      term.sign = -1.0;
    } else {
      throw std::invalid_argument("cluster center inside the grid interval");
    }
    const double da = std::abs(a - c.center) + c.width;
    const double db = std::abs(b - c.center) + c.width;
    if (!(da > 0.0) || !(db > 0.0)) {
      throw std::invalid_argument("cluster with zero width touches the interval");
    }
    term.log_a = std::log(da);
    term.span = std::log(db) - term.log_a;  // signed
    terms.push_back(term);
    total += c.weight;
  }
  if (!(total > 0.0)) throw std::invalid_argument("clustered grid has no density");

  const double len = b - a;
  auto cumulative = [&](double t) {
    double acc = bulk * (t - a) / len;
    for (const auto& k : terms) {
      acc += k.weight * (std::log(std::abs(t - k.center) + k.width) - k.log_a) / k.span;
    }
    return acc / total;
  };
  auto density = [&](double t) {
    double acc = bulk / len;
    for (const auto& k : terms) {
      acc += k.weight * k.sign / ((std::abs(t - k.center) + k.width) * k.span);
    }
    return acc / total;
  };

  std::vector<double> t(n);
  t.front() = a;
  t.back() = b;
  double guess = a;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double target = static_cast<double>(i) / static_cast<double>(n - 1);
    double lo = t[i - 1];
    double hi = b;
    double x = std::clamp(guess, lo, hi);
    for (int it = 0; it < 100; ++it) {
      const double g = cumulative(x) - target;
      if (g > 0.0) hi = x; else lo = x;
      double next = x - g / density(x);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - x) <= 1e-15 * std::abs(x) || hi - lo <= 1e-15 * std::abs(hi)) {
        x = next;
        break;
      }
      x = next;
    }
    t[i] = x;
    guess = x + (x - t[i - 1]);
  }
  return Grid(std::move(t));
}

Grid Grid::join(const Grid& left, const Grid& right) {
  if (left.back() != right.front()) {
    throw std::invalid_argument("joined grids must share their end node");
  }
  std::vector<double> t(left.nodes().begin(), left.nodes().end());
  t.insert(t.end(), right.nodes().begin() + 1, right.nodes().end());
  return Grid(std::move(t), std::max(left.grading(), right.grading()), left.size() - 1);
}

void Grid::require_inside(double upper) const {
  if (!(front() > 0.0) || !(back() < upper)) {
    throw DomainError(fmt::format("grid [{}, {}] leaves (0, {})", front(), back(), upper));
  }
}

// ---------------------------------------------------------------------------
// Profile

Profile::Profile(Grid grid, std::vector<double> values, std::vector<double> slopes,
                 std::optional<JunctionSlopes> junction)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      slopes_(std::move(slopes)),
      junction_(junction) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("profile length differs from grid length");
  }
  if (!slopes_.empty() && slopes_.size() != grid_.size()) {
    throw std::invalid_argument("slope column length differs from grid length");
  }
  if (junction_ && !grid_.junction()) {
    throw std::invalid_argument("junction slopes given for a grid without junction");
  }
}

bool Profile::within_closed_range() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v >= 0.0 && v <= kPi; });
}

bool Profile::strictly_increasing() const {
  return std::adjacent_find(values_.begin(), values_.end(), std::greater_equal<>()) ==
         values_.end();
}

double Profile::operator()(double t) const {
  const auto x = grid_.nodes();
  if (t < x.front() || t > x.back()) {
    throw DomainError(fmt::format("profile queried at {} outside [{}, {}]", t, x.front(),
                                  x.back()));
  }
  auto it = std::upper_bound(x.begin(), x.end(), t);
  if (it == x.end()) return values_.back();
  const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double w = (t - x[i]) / (x[i + 1] - x[i]);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

std::vector<double> Profile::derivative() const {
  if (!slopes_.empty()) return slopes_;
  const auto t = grid_.nodes();
  const std::size_t n = t.size();
  std::vector<double> d(n, 0.0);
  if (n == 2) {
    d[0] = d[1] = (values_[1] - values_[0]) / (t[1] - t[0]);
    return d;
  }
  const auto& y = values_;
  d[0] = fd::first_forward(t[1] - t[0], t[2] - t[1], y[0], y[1], y[2]);
  d[n - 1] = fd::first_backward(t[n - 1] - t[n - 2], t[n - 2] - t[n - 3], y[n - 3], y[n - 2],
                                y[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = fd::first_central(t[i] - t[i - 1], t[i + 1] - t[i], y[i - 1], y[i], y[i + 1]);
  }
  if (junction_) d[*grid_.junction()] = 0.5 * (junction_->left + junction_->right);
  return d;
}

// ---------------------------------------------------------------------------
// Finite differences

namespace fd {

double first_central(double h0, double h1, double y0, double y1, double y2) {
  return (-h1 / (h0 * (h0 + h1))) * y0 + ((h1 - h0) / (h0 * h1)) * y1 +
         (h0 / (h1 * (h0 + h1))) * y2;
}

double second_central(double h0, double h1, double y0, double y1, double y2) {
  return 2.0 * (y0 / (h0 * (h0 + h1)) - y1 / (h0 * h1) + y2 / (h1 * (h0 + h1)));
}

double first_backward(double h_near, double h_far, double y_far, double y_mid, double y_end) {
  const double h = h_near + h_far;
  return y_end * (2.0 * h_near + h_far) / (h_near * h) - y_mid * h / (h_near * h_far) +
         y_far * h_near / (h_far * h);
}

double first_forward(double h_near, double h_far, double y_end, double y_mid, double y_far) {
  const double h = h_near + h_far;
  return -y_end * (2.0 * h_near + h_far) / (h_near * h) + y_mid * h / (h_near * h_far) -
         y_far * h_near / (h_far * h);
}

}  // namespace fd

// ---------------------------------------------------------------------------
// Residuals

std::vector<double> residual(const Profile& profile, const HopfParams& params) {
  profile.grid().require_inside(kHalfPi);
  return second_order_residual(
      profile, [&](double t) { return drift(t, params); },
      [&](double t) { return coeff_Q(t, params); });
}

std::vector<double> flux_residual(const Profile& profile, const HopfParams& params) {
  profile.grid().require_inside(kHalfPi);
  const auto t = profile.grid().nodes();
  const auto y = profile.values();
  const std::size_t n = t.size();
  if (n < 3) throw std::invalid_argument("residual needs at least 3 nodes");
  std::vector<double> r(n, kNaN);
  const auto skip = profile.junction() ? profile.grid().junction() : std::nullopt;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (skip && *skip == i) continue;
    const double h0 = t[i] - t[i - 1];
    const double h1 = t[i + 1] - t[i];
    const double fl = weight_f(0.5 * (t[i] + t[i - 1]), params);
    const double fr = weight_f(0.5 * (t[i] + t[i + 1]), params);
    const double flux = (fr * (y[i + 1] - y[i]) / h1 - fl * (y[i] - y[i - 1]) / h0) /
                        (0.5 * (h0 + h1));
    r[i] = flux - weight_f(t[i], params) * coeff_Q(t[i], params) * std::sin(y[i]) *
                      std::cos(y[i]);
  }
  return r;
}

std::vector<double> limit_residual(const Profile& profile, double lambda) {
  if (!(profile.grid().front() > 0.0)) {
    throw DomainError("limit_residual: nodes must be positive");
  }
  return second_order_residual(
      profile, [](double t) { return 1.0 / t; },
      [&](double t) { return lambda / (t * t); });
}

std::vector<double> rescaled_residual(const Profile& profile, double s,
                                      const HopfParams& params) {
  if (!(s > 0.0)) throw DomainError("rescaled_residual: s must be positive");
  profile.grid().require_inside(kHalfPi / s);
  return second_order_residual(
      profile, [&](double t) { return s * drift(s * t, params); },
      [&](double t) { return s * s * coeff_Q(s * t, params); });
}

double ode_operator(double t, double value, double d1, double d2, const HopfParams& params) {
  return d2 + drift(t, params) * d1 - coeff_Q(t, params) * std::sin(value) * std::cos(value);
}

double limit_operator(double t, double value, double d1, double d2, double lambda) {
  if (!(t > 0.0)) throw DomainError("limit_operator: t must be positive");
  return d2 + d1 / t - lambda / (t * t) * std::sin(value) * std::cos(value);
}

double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) m = std::max(m, std::abs(v));
  }
  return m;
}

// ---------------------------------------------------------------------------
// CSV

void write_profile_csv(std::ostream& out, const Profile& profile, const HopfParams& params) {
  const auto t = profile.grid().nodes();
  const auto y = profile.values();
  const auto d = profile.derivative();
  std::vector<double> r(t.size(), kNaN);
  if (t.size() >= 3 && t.front() > 0.0 && t.back() < kHalfPi) r = residual(profile, params);
  out << "t,alpha,dalpha,residual\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << format_double(t[i]) << ',' << format_double(y[i]) << ',' << format_double(d[i])
        << ',' << (std::isnan(r[i]) ? std::string("nan") : format_double(r[i])) << '\n';
  }
}

Profile read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("profile csv: empty input");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto ct = column("t");
  const auto ca = column("alpha");
  const auto cd = column("dalpha");
  if (!ct || !ca) throw std::runtime_error("profile csv: missing t or alpha column");

  std::vector<double> t, a, d;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < header.size()) throw std::runtime_error("profile csv: short row");
    t.push_back(std::stod(cells[*ct]));
    a.push_back(std::stod(cells[*ca]));
    if (cd) d.push_back(std::stod(cells[*cd]));
  }
  return Profile(Grid(std::move(t)), std::move(a), std::move(d));
}

}  // namespace hopf
