#include "hopf/shooting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "hopf/errors.hpp"

namespace hopf {

namespace {

namespace ode = boost::numeric::odeint;
using State = std::array<double, 2>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Blowup {
  double tau;
};

// Trajectory in the distance tau from the seeding endpoint, for the local
// parameters (mirrored ones when seeding at pi/2).
struct Local {
  std::vector<double> tau;
  std::vector<double> value;
  std::vector<double> slope;
  std::optional<double> blowup;
};

Local shoot_local(double c, const HopfParams& local, std::span<const double> taus,
                  const ShootingOptions& options) {
  if (!(c > 0.0)) throw DomainError(fmt::format("shooting amplitude must be > 0, got {}", c));
  // Points mapped through pi/2 - t may undershoot t_seed by round-off.
  if (taus.empty() || taus.front() < options.t_seed - 1e-12 || taus.back() >= kHalfPi) {
    throw DomainError("shooting output points must lie in [t_seed, pi/2)");
  }
  std::vector<double> times;
  times.reserve(taus.size() + 1);
  const bool skip_first = taus.front() > options.t_seed;
  if (skip_first) times.push_back(options.t_seed);
  times.insert(times.end(), taus.begin(), taus.end());
  times.front() = std::max(times.front(), options.t_seed);

  const auto [a0, d0] = series_seed(c, times.front(), local);
  State x{a0, d0};
  auto rhs = [&local](const State& y, State& dy, double t) {
    dy[0] = y[1];
    dy[1] = -drift(t, local) * y[1] + coeff_Q(t, local) * std::sin(y[0]) * std::cos(y[0]);
  };

  Local out;
  bool first = true;
  auto observer = [&](const State& y, double t) {
    if (!(y[0] >= -kPi && y[0] <= 2.0 * kPi)) throw Blowup{t};
    if (first && skip_first) {
      first = false;
      return;
    }
    first = false;
    out.tau.push_back(t);
    out.value.push_back(y[0]);
    out.slope.push_back(y[1]);
  };
  // The seed c t^r can sit far below abs_tol; an unscaled absolute tolerance
  // would let the first steps drift and make the shot depend on the output grid.
  const double abs_tol = options.abs_tol * std::min(1.0, std::abs(a0));
  auto stepper =
      ode::make_controlled(abs_tol, options.rel_tol, ode::runge_kutta_dopri5<State>());
  try {
    ode::integrate_times(stepper, rhs, x, times.begin(), times.end(),
                         1e-2 * times.front(), observer, ode::max_step_checker(200000));
  } catch (const Blowup& b) {
    out.blowup = b.tau;
  } catch (const ode::no_progress_error&) {
    throw ConvergenceError("shooting integrator made no progress", kNaN);
  } catch (const ode::step_adjustment_error&) {
    throw ConvergenceError("shooting integrator step size underflow", kNaN);
  }
  return out;
}

std::vector<double> log_points(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = a * std::pow(b / a, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  v.back() = b;
  return v;
}

// (a, a') at distance tau_end from the seeding endpoint; NaN after a blow-up.
std::pair<double, double> end_state(double c, const HopfParams& local, double tau_end,
                                    const ShootingOptions& options) {
  // Intermediate points keep the blow-up check meaningful.
  const auto taus = log_points(options.t_seed, tau_end, 24);
  const Local traj = shoot_local(c, local, taus, options);
  if (traj.blowup) return {kNaN, kNaN};
  return {traj.value.back(), traj.slope.back()};
}

struct Mismatch {
  double da = kNaN;
  double dd = kNaN;
  bool valid() const { return std::isfinite(da) && std::isfinite(dd); }
  double norm() const { return valid() ? std::max(std::abs(da), std::abs(dd)) : kNaN; }
};

Mismatch mismatch_at(double c0, double c1, const HopfParams& params,
                     const ShootingOptions& options) {
  const auto [la, ld] = left_state(c0, params, options);
  const auto [ra, rd] = right_state(c1, params, options);
  return {la - ra, ld - rd};
}

struct ScanGrid {
  std::vector<double> amps;
  std::vector<std::pair<double, double>> left, right;
  Mismatch at(std::size_t i, std::size_t j) const {
    return {left[i].first - right[j].first, left[i].second - right[j].second};
  }
};

ScanGrid coarse_scan(const HopfParams& params, const ShootingOptions& options) {
  ScanGrid g;
  g.amps = log_points(options.amp_min, options.amp_max, options.scan_points);
  for (double c : g.amps) {
    g.left.push_back(left_state(c, params, options));
    g.right.push_back(right_state(c, params, options));
  }
  return g;
}

bool sign_change(std::initializer_list<double> v) {
  bool pos = false;
  bool neg = false;
  for (double x : v) {
    if (!std::isfinite(x)) return false;
    pos = pos || x >= 0.0;
    neg = neg || x <= 0.0;
  }
  return pos && neg;
}

struct Seeds {
  std::vector<std::pair<double, double>> points;
  bool sign_change = false;
};

Seeds pick_seeds(const ScanGrid& g, const ShootingOptions& options) {
  struct Candidate {
    double score;
    double c0, c1;
  };
  std::vector<Candidate> cells;
  std::vector<Candidate> points;
  const std::size_t n = g.amps.size();
  Seeds out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Mismatch m = g.at(i, j);
      if (m.valid()) points.push_back({m.norm(), g.amps[i], g.amps[j]});
      if (i + 1 == n || j + 1 == n) continue;
      const Mismatch m10 = g.at(i + 1, j), m01 = g.at(i, j + 1), m11 = g.at(i + 1, j + 1);
      if (sign_change({m.da, m10.da, m01.da, m11.da}) &&
          sign_change({m.dd, m10.dd, m01.dd, m11.dd})) {
        out.sign_change = true;
        const double score = std::min({m.norm(), m10.norm(), m01.norm(), m11.norm()});
        cells.push_back({score, std::sqrt(g.amps[i] * g.amps[i + 1]),
                         std::sqrt(g.amps[j] * g.amps[j + 1])});
      }
    }
  }
  auto by_score = [](const Candidate& a, const Candidate& b) { return a.score < b.score; };
  std::sort(cells.begin(), cells.end(), by_score);
  std::sort(points.begin(), points.end(), by_score);
  if (options.seed) out.points.push_back(*options.seed);
  for (const auto& list : {cells, points}) {
    for (const auto& c : list) {
      if (out.points.size() >= static_cast<std::size_t>(options.max_seeds)) break;
      out.points.emplace_back(c.c0, c.c1);
    }
  }
  return out;
}

// Broyden iteration on x = (log c0, log c1). Returns the converged state or nullopt.
std::optional<ShootState> broyden(std::pair<double, double> seed, const HopfParams& params,
                                  const ShootingOptions& options) {
  auto eval = [&](const std::array<double, 2>& x) {
    return mismatch_at(std::exp(x[0]), std::exp(x[1]), params, options);
  };
  // Iterates stay in the scanned amplitude box: as c0 grows the left shot
  // degenerates into a bubble at t = 0 followed by a near-constant pi, and the
  // absolute mismatch decays without any solution nearby.
  const double lo = std::log(options.amp_min);
  const double hi = std::log(options.amp_max);
  auto inside = [&](const std::array<double, 2>& x) {
    return x[0] >= lo && x[0] <= hi && x[1] >= lo && x[1] <= hi;
  };
  std::array<double, 2> x{std::log(seed.first), std::log(seed.second)};
  if (!inside(x)) return std::nullopt;
  Mismatch f = eval(x);
  if (!f.valid()) return std::nullopt;

  std::array<double, 4> jac{};
  auto fd_jacobian = [&]() {
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
      auto xh = x;
      xh[k] += h;
      const Mismatch fh = eval(xh);
      if (!fh.valid()) return false;
      jac[0 + k] = (fh.da - f.da) / h;
      jac[2 + k] = (fh.dd - f.dd) / h;
    }
    return true;
  };
  if (!fd_jacobian()) return std::nullopt;
  bool fresh = true;

  for (int it = 0; it < options.max_iterations; ++it) {
    if (f.norm() < options.mismatch_tol) {
      return ShootState{std::exp(x[0]), std::exp(x[1]), options.t_match, f.da, f.dd};
    }
    const double det = jac[0] * jac[3] - jac[1] * jac[2];
    std::array<double, 2> dx{kNaN, kNaN};
    if (std::abs(det) > 1e-300) {
      dx = {(-f.da * jac[3] + f.dd * jac[1]) / det, (-f.dd * jac[0] + f.da * jac[2]) / det};
    }
    bool ok = std::isfinite(dx[0]) && std::isfinite(dx[1]);
    Mismatch fn;
    std::array<double, 2> xn = x;
    if (ok) {
      const double len = std::max(std::abs(dx[0]), std::abs(dx[1]));
      double theta = std::min(1.0, 2.0 / len);
      ok = false;
      for (int k = 0; k < 30; ++k) {
        xn = {x[0] + theta * dx[0], x[1] + theta * dx[1]};
        if (!inside(xn)) {
          theta *= 0.5;
          continue;
        }
        fn = eval(xn);
        if (fn.valid() && fn.norm() < f.norm()) {
          ok = true;
          break;
        }
        theta *= 0.5;
      }
    }
    if (!ok) {
      if (fresh) return std::nullopt;
      if (!fd_jacobian()) return std::nullopt;
      fresh = true;
      continue;
    }
    const std::array<double, 2> s{xn[0] - x[0], xn[1] - x[1]};
    const double ss = s[0] * s[0] + s[1] * s[1];
    const double ya = fn.da - f.da - (jac[0] * s[0] + jac[1] * s[1]);
    const double yd = fn.dd - f.dd - (jac[2] * s[0] + jac[3] * s[1]);
    jac[0] += ya * s[0] / ss;
    jac[1] += ya * s[1] / ss;
    jac[2] += yd * s[0] / ss;
    jac[3] += yd * s[1] / ss;
    fresh = false;
    x = xn;
    f = fn;
  }
  if (f.norm() < options.mismatch_tol) {
    return ShootState{std::exp(x[0]), std::exp(x[1]), options.t_match, f.da, f.dd};
  }
  return std::nullopt;
}

// p = q = 1, lambda = mu: every 2 arctan(k tan^{sqrt(lambda)} t) solves the
// problem, so the matching Jacobian is singular. The mirror symmetry maps the
// member with c0 = c1 to itself; that member is selected.
bool degenerate_family(const HopfParams& params) {
  return params.p == 1 && params.q == 1 && params.lambda == params.mu;
}

std::optional<ShootState> symmetric_member(const ScanGrid& g, const HopfParams& params,
                                           const ShootingOptions& options) {
  auto gap = [&](double logc) {
    const double c = std::exp(logc);
    return left_state(c, params, options).first - right_state(c, params, options).first;
  };
  for (std::size_t i = 0; i + 1 < g.amps.size(); ++i) {
    const double f0 = g.left[i].first - g.right[i].first;
    const double f1 = g.left[i + 1].first - g.right[i + 1].first;
    if (!sign_change({f0, f1})) continue;
    std::uintmax_t iters = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        gap, std::log(g.amps[i]), std::log(g.amps[i + 1]), f0, f1,
        boost::math::tools::eps_tolerance<double>(52), iters);
    const double c = std::exp(0.5 * (lo + hi));
    const Mismatch m = mismatch_at(c, c, params, options);
    if (m.valid() && m.norm() < options.mismatch_tol) {
      return ShootState{c, c, options.t_match, m.da, m.dd};
    }
  }
  return std::nullopt;
}

Profile merged_profile(const ShootState& st, const HopfParams& params,
                       const ShootingOptions& options) {
  const double tm = st.t_match;
  const Cluster at_zero[] = {{0.0, 0.0, 0.3}};
  const Cluster at_top[] = {{kHalfPi, 0.0, 0.3}};
  const Grid left = Grid::clustered(options.t_seed, tm, options.nodes_per_side, 0.7, at_zero);
  const Grid right =
      Grid::clustered(tm, kHalfPi - options.t_seed, options.nodes_per_side, 0.7, at_top);
  const Shot l = integrate_from_zero(st.c0, params, tm, options, left.nodes());
  const Shot r = integrate_from_pi2(st.c1, params, tm, options, right.nodes());
  if (l.blowup_time || r.blowup_time) {
    throw ConvergenceError("merged shooting profile left the admissible range", kNaN);
  }
  Grid grid = Grid::join(left, right);
  std::vector<double> v(l.profile.values().begin(), l.profile.values().end());
  std::vector<double> d(l.profile.slopes().begin(), l.profile.slopes().end());
  // Both sides agree at t_match to the mismatch tolerance; the mean is stored.
  v.back() = 0.5 * (v.back() + r.profile.values().front());
  d.back() = 0.5 * (d.back() + r.profile.slopes().front());
  v.insert(v.end(), r.profile.values().begin() + 1, r.profile.values().end());
  d.insert(d.end(), r.profile.slopes().begin() + 1, r.profile.slopes().end());
  return Profile(std::move(grid), std::move(v), std::move(d));
}

}  // namespace

double ShootState::mismatch() const { return std::max(std::abs(d_alpha), std::abs(d_dalpha)); }

std::pair<double, double> series_seed(double c, double t, const HopfParams& params) {
  const double p = params.p;
  const double q = params.q;
  const double lam = params.lambda;
  const double r = params.r0;
  const double k = ((p / 3.0 + q) * r + lam / 3.0 + params.mu) / ((r + 2.0) * (r + 1.0 + p) - lam);
  const double m = -(2.0 / 3.0) * lam / (8.0 * r * r + 2.0 * r * (p - 1.0));
  const double tr = std::pow(t, r);
  const double c3 = c * c * c;
  const double value = c * tr * (1.0 + k * t * t) + m * c3 * tr * tr * tr;
  const double slope =
      c * tr / t * (r + k * (r + 2.0) * t * t) + 3.0 * r * m * c3 * tr * tr * tr / t;
  return {value, slope};
}

Shot integrate_from_zero(double c0, const HopfParams& params, double t_end,
                         const ShootingOptions& options, std::span<const double> output) {
  if (!(t_end > options.t_seed && t_end < kHalfPi)) {
    throw DomainError(fmt::format("integrate_from_zero: t_end = {} outside (t_seed, pi/2)", t_end));
  }
  std::vector<double> pts(output.begin(), output.end());
  if (pts.empty()) pts = log_points(options.t_seed, t_end, 400);
  const Local traj = shoot_local(c0, params, pts, options);
  const std::size_t n = traj.tau.size();
  if (n < 2) {
    throw ConvergenceError(
        fmt::format("shot with c0 = {} left [-pi, 2pi] immediately", c0), kNaN);
  }
  return Shot{Profile(Grid(traj.tau), traj.value, traj.slope), traj.blowup};
}

Shot integrate_from_pi2(double c1, const HopfParams& params, double t_start,
                        const ShootingOptions& options, std::span<const double> output) {
  if (!(t_start > 0.0 && t_start < kHalfPi - options.t_seed)) {
    throw DomainError(
        fmt::format("integrate_from_pi2: t_start = {} outside (0, pi/2 - t_seed)", t_start));
  }
  std::vector<double> taus;
  if (output.empty()) {
    taus = log_points(options.t_seed, kHalfPi - t_start, 400);
  } else {
    for (auto it = output.rbegin(); it != output.rend(); ++it) taus.push_back(kHalfPi - *it);
  }
  const Local traj = shoot_local(c1, params.mirrored(), taus, options);
  const std::size_t n = traj.tau.size();
  if (n < 2) {
    throw ConvergenceError(
        fmt::format("shot with c1 = {} left [-pi, 2pi] immediately", c1), kNaN);
  }
  std::vector<double> t(n), v(n), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = n - 1 - i;
    t[i] = kHalfPi - traj.tau[k];
    v[i] = kPi - traj.value[k];
    d[i] = traj.slope[k];
  }
  std::optional<double> blowup;
  if (traj.blowup) blowup = kHalfPi - *traj.blowup;
  return Shot{Profile(Grid(std::move(t)), std::move(v), std::move(d)), blowup};
}

std::pair<double, double> left_state(double c0, const HopfParams& params,
                                     const ShootingOptions& options) {
  return end_state(c0, params, options.t_match, options);
}

std::pair<double, double> right_state(double c1, const HopfParams& params,
                                      const ShootingOptions& options) {
  const auto [b, db] = end_state(c1, params.mirrored(), kHalfPi - options.t_match, options);
  return {kPi - b, db};
}

ShootingResult match_shooting(const HopfParams& params, const ShootingOptions& options) {
  if (!(options.t_match > options.t_seed && options.t_match < kHalfPi - options.t_seed)) {
    throw DomainError(fmt::format("t_match = {} outside the integration range", options.t_match));
  }
  ShootingResult out;
  out.state.t_match = options.t_match;
  try {
    const ScanGrid grid = coarse_scan(params, options);
    std::optional<ShootState> found;
    if (degenerate_family(params)) {
      out.family_pinned = true;
      found = symmetric_member(grid, params, options);
      out.seeds_tried = 1;
    } else {
      const Seeds seeds = pick_seeds(grid, options);
      out.scan_sign_change = seeds.sign_change;
      int oscillating = 0;
      for (const auto& seed : seeds.points) {
        ++out.seeds_tried;
        found = broyden(seed, params, options);
        if (!found) continue;
        // Matched trajectories that wind around pi/2 solve the boundary value
        // problem too, but the sought solution is monotone.
        Profile merged = merged_profile(*found, params, options);
        if (merged.strictly_increasing() && merged.within_closed_range()) {
          out.state = *found;
          out.profile = std::move(merged);
          out.status = ShootStatus::converged;
          return out;
        }
        ++oscillating;
        found.reset();
      }
      out.status = ShootStatus::no_solution;
      out.message = fmt::format("no monotone solution found from {} seeds ({} non-monotone)",
                                out.seeds_tried, oscillating);
      return out;
    }
    if (!found) {
      out.status = ShootStatus::no_solution;
      out.message = fmt::format("no solution found from {} seeds", out.seeds_tried);
      return out;
    }
    out.state = *found;
    out.profile = merged_profile(out.state, params, options);
    out.status = ShootStatus::converged;
  } catch (const ConvergenceError& e) {
    out.status = ShootStatus::failed;
    out.message = e.what();
  }
  return out;
}

void write_mismatch_map(std::ostream& out, const HopfParams& params,
                        const ShootingOptions& options) {
  const ScanGrid g = coarse_scan(params, options);
  out << "c0,c1,dalpha,ddalpha\n";
  for (std::size_t i = 0; i < g.amps.size(); ++i) {
    for (std::size_t j = 0; j < g.amps.size(); ++j) {
      const Mismatch m = g.at(i, j);
      out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", g.amps[i], g.amps[j], m.da, m.dd);
    }
  }
}

}  // namespace hopf
