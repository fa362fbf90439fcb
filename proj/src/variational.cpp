#include "hopf/variational.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include <fmt/format.h>

#include "hopf/errors.hpp"
#include "hopf/quadrature.hpp"

namespace hopf {

namespace {

// E(a) = sum_c W_c (a_{c+1} - a_c)^2 + sum_i V_i sin^2 a_i + B (a_end - target)^2.
// The last term is the energy of the truncated piece between the outermost node
// and the singular endpoint for the local power law c t^r; it turns the free end
// into the Robin condition a' = r a / t instead of a' = 0.
struct Discretization {
  std::vector<double> cell;  // W_c = f(midpoint) / h_c
  std::vector<double> node;  // V_i = (dual cell length) Q(t_i) f(t_i)
  std::vector<double> stiffness;  // 2 (W_{i-1} + W_i)
  std::size_t pinned;
  std::size_t lo, hi;  // free nodes [lo, hi]
  std::size_t end;     // outermost free node
  double tail = 0.0;   // B
  double target = 0.0;
};

Discretization discretize(const Grid& grid, const HopfParams& params, Side side) {
  const auto t = grid.nodes();
  const std::size_t n = t.size();
  Discretization d;
  d.cell.resize(n - 1);
  d.node.resize(n);
  d.stiffness.assign(n, 0.0);
  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double h = t[c + 1] - t[c];
    d.cell[c] = weight_f(0.5 * (t[c] + t[c + 1]), params) / h;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? t[i] - t[i - 1] : 0.0;
    const double right = i + 1 < n ? t[i + 1] - t[i] : 0.0;
    d.node[i] = 0.5 * (left + right) * coeff_Q(t[i], params) * weight_f(t[i], params);
    if (i > 0) d.stiffness[i] += 2.0 * d.cell[i - 1];
    if (i + 1 < n) d.stiffness[i] += 2.0 * d.cell[i];
  }
  if (side == Side::interior) {
    d.pinned = n - 1;
    d.lo = 0;
    d.hi = n - 2;
    d.end = 0;
    d.tail = params.r0 * weight_f(t[0], params) / t[0];
    d.target = 0.0;
  } else {
    d.pinned = 0;
    d.lo = 1;
    d.hi = n - 1;
    d.end = n - 1;
    const double gap = kHalfPi - t[n - 1];
    d.tail = params.r1 * weight_f(t[n - 1], params) / gap;
    d.target = kPi;
  }
  d.stiffness[d.end] += 2.0 * d.tail;
  return d;
}

double energy(const Discretization& d, std::span<const double> a) {
  double e = 0.0;
  for (std::size_t c = 0; c < d.cell.size(); ++c) {
    const double da = a[c + 1] - a[c];
    e += d.cell[c] * da * da;
  }
  for (std::size_t i = 0; i < d.node.size(); ++i) {
    const double s = std::sin(a[i]);
    e += d.node[i] * s * s;
  }
  const double off = a[d.end] - d.target;
  return e + d.tail * off * off;
}

void gradient(const Discretization& d, std::span<const double> a, std::vector<double>& g) {
  const std::size_t n = a.size();
  g.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double gi = d.node[i] * std::sin(2.0 * a[i]);
    if (i > 0) gi += 2.0 * d.cell[i - 1] * (a[i] - a[i - 1]);
    if (i + 1 < n) gi -= 2.0 * d.cell[i] * (a[i + 1] - a[i]);
    g[i] = gi;
  }
  g[d.end] += 2.0 * d.tail * (a[d.end] - d.target);
  g[d.pinned] = 0.0;
}

double scaled_norm(const Discretization& d, const std::vector<double>& g) {
  double m = 0.0;
  for (std::size_t i = d.lo; i <= d.hi; ++i) m = std::max(m, std::abs(g[i]) / d.stiffness[i]);
  return m;
}

// Solves (H + shift diag(stiffness)) x = rhs on the free block by LDL^T.
// Returns false when a pivot is not positive.
bool solve_tridiagonal(const Discretization& d, std::span<const double> a, double shift,
                       const std::vector<double>& rhs, std::vector<double>& x) {
  const std::size_t m = d.hi - d.lo + 1;
  std::vector<double> diag(m), lower(m, 0.0), y(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = d.lo + k;
    const double hii = d.stiffness[i] + 2.0 * d.node[i] * std::cos(2.0 * a[i]) +
                       shift * d.stiffness[i];
    if (k == 0) {
      diag[k] = hii;
    } else {
      const double off = -2.0 * d.cell[i - 1];
      lower[k] = off / diag[k - 1];
      diag[k] = hii - lower[k] * off;
    }
    if (!(diag[k] > 0.0) || !std::isfinite(diag[k])) return false;
  }
  for (std::size_t k = 0; k < m; ++k) {
    y[k] = rhs[d.lo + k] - (k > 0 ? lower[k] * y[k - 1] : 0.0);
  }
  x.assign(a.size(), 0.0);
  for (std::size_t k = m; k-- > 0;) {
    double v = y[k] / diag[k];
    if (k + 1 < m) v -= lower[k + 1] * x[d.lo + k + 1];
    x[d.lo + k] = v;
  }
  return true;
}

Minimizer minimize(Side side, double s, const HopfParams& params, const Grid& grid,
                   const SolverOptions& options) {
  FunctionalSpec{side, s, grid, params}.validate();
  const auto d = discretize(grid, params, side);
  const auto t = grid.nodes();
  const std::size_t n = t.size();

  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (side == Side::interior) {
      a[i] = std::min(kHalfPi, kHalfPi * std::pow(t[i] / s, params.r0));
    } else {
      const double x = (kHalfPi - t[i]) / (kHalfPi - s);
      a[i] = std::clamp(kPi - kHalfPi * std::pow(x, params.r1), kHalfPi, kPi);
    }
  }
  a[d.pinned] = kHalfPi;

  Minimizer out{Profile(grid, a), 0.0, 0.0, 0, false, false, {}};
  double e = energy(d, a);
  out.energy_history.push_back(e);

  std::vector<double> g, step, trial(n);
  double norm = 0.0;
  int it = 0;
  for (;; ++it) {
    gradient(d, a, g);
    norm = scaled_norm(d, g);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -g[i];
    double shift = 0.0;
    while (!solve_tridiagonal(d, a, shift, rhs, step)) {
      shift = shift == 0.0 ? 1e-8 : shift * 10.0;
      if (shift > 1e8) break;
    }
    // Smooth error modes have small Hessian eigenvalues, so a small gradient
    // alone does not bound the error; the Newton correction must be small too.
    if (norm <= options.gradient_tol && shift == 0.0 &&
        max_abs(std::span<const double>(step).subspan(d.lo, d.hi - d.lo + 1)) <=
            options.step_tol) {
      break;
    }
    if (it >= options.max_iterations) {
      throw ConvergenceError(
          fmt::format("minimizer ({} side, s = {}) not converged after {} iterations, "
                      "gradient norm {:.3e}",
                      side == Side::interior ? "interior" : "exterior", s, it, norm),
          norm);
    }
    auto line_search = [&](const std::vector<double>& dir, double& e_new) {
      double slope = 0.0;
      double biggest = 0.0;
      for (std::size_t i = d.lo; i <= d.hi; ++i) {
        slope += g[i] * dir[i];
        biggest = std::max(biggest, std::abs(dir[i]));
      }
      if (!(slope < 0.0)) return false;
      double theta = std::min(1.0, 0.5 / biggest);
      const double roundoff = 1e-13 * std::max(1.0, std::abs(e));
      for (int k = 0; k < 60; ++k) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = a[i] + theta * dir[i];
        e_new = energy(d, trial);
        if (e_new <= e + 1e-4 * theta * slope) return true;
        // Newton steps that only move the energy at round-off level are accepted.
        if (theta == 1.0 && -slope <= roundoff && e_new <= e + roundoff) return true;
        theta *= 0.5;
      }
      return false;
    };

    double e_new = e;
    bool accepted = shift <= 1e8 && line_search(step, e_new);
    if (!accepted) {
      // scaled steepest descent
      step.assign(n, 0.0);
      for (std::size_t i = d.lo; i <= d.hi; ++i) step[i] = -g[i] / d.stiffness[i];
      accepted = line_search(step, e_new);
    }
    if (!accepted) {
      if (norm <= 1e3 * options.gradient_tol) break;  // stalled at round-off
      throw ConvergenceError(
          fmt::format("minimizer line search stalled (s = {}), gradient norm {:.3e}", s, norm),
          norm);
    }
    a.swap(trial);
    e = e_new;
    out.energy_history.push_back(e);
  }

  out.profile = Profile(grid, a);
  out.energy = e;
  out.gradient_norm = norm;
  out.iterations = it;
  out.monotone = std::adjacent_find(a.begin(), a.end(), std::greater<>()) == a.end();
  out.attached = side == Side::interior ? a.front() <= options.boundary_tol
                                        : a.back() >= kPi - options.boundary_tol;
  return out;
}

double integral_on(const Profile& profile, auto&& weight) {
  const auto t = profile.grid().nodes();
  const auto a = profile.values();
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double s = std::sin(a[i]);
    y[i] = weight(t[i]) * s * s;
  }
  return simpson(t, y);
}

}  // namespace

void FunctionalSpec::validate() const {
  grid.require_inside(kHalfPi);
  if (!(s > 0.0 && s < kHalfPi)) throw DomainError(fmt::format("junction s = {} outside (0, pi/2)", s));
  const double end = side == Side::interior ? grid.back() : grid.front();
  if (std::abs(end - s) > 1e-14 * s) {
    throw DomainError(fmt::format("{} grid does not meet the junction s = {} (node {})",
                                  side == Side::interior ? "interior" : "exterior", s, end));
  }
  if (grid.size() < 4) throw std::invalid_argument("functional grid needs at least 4 nodes");
}

Grid interior_grid(double s, const SolverOptions& options) {
  if (!(s > 0.0 && s < kHalfPi)) {
    throw DomainError(fmt::format("interior grid: s = {} outside (0, pi/2)", s));
  }
  const double w = 0.05 * std::min(s, kHalfPi - s);
  const Cluster clusters[] = {{0.0, 0.0, 0.25}, {s, w, 0.2}};
  return Grid::clustered(options.endpoint_gap * s, s, options.nodes_per_side, 0.55, clusters);
}

Grid exterior_grid(double s, const SolverOptions& options) {
  if (!(s > 0.0 && s < kHalfPi)) {
    throw DomainError(fmt::format("exterior grid: s = {} outside (0, pi/2)", s));
  }
  const double w = 0.05 * std::min(s, kHalfPi - s);
  const Cluster clusters[] = {{s, w, 0.3}, {kHalfPi, 0.0, 0.25}};
  return Grid::clustered(s, kHalfPi - options.endpoint_gap * (kHalfPi - s),
                         options.nodes_per_side, 0.45,
                         clusters);
}

double eval_functional(const FunctionalSpec& spec, const Profile& profile) {
  spec.validate();
  if (profile.size() != spec.grid.size()) {
    throw std::invalid_argument("profile does not live on the functional grid");
  }
  const auto v = profile.values();
  const double pinned = spec.side == Side::interior ? v.back() : v.front();
  if (std::abs(pinned - kHalfPi) > 1e-12) {
    throw DomainError(fmt::format("constraint violated: a(s) = {} != pi/2", pinned));
  }
  const auto d = discretize(spec.grid, spec.params, spec.side);
  return energy(d, v);
}

Minimizer minimize_interior(double s, const HopfParams& params, const Grid& grid,
                            const SolverOptions& options) {
  return minimize(Side::interior, s, params, grid, options);
}

Minimizer minimize_exterior(double s, const HopfParams& params, const Grid& grid,
                            const SolverOptions& options) {
  return minimize(Side::exterior, s, params, grid, options);
}

double weight_flux_derivative(double t, const HopfParams& params) {
  // f^2 Q = lambda sin^{2p-2} cos^{2q} + mu sin^{2p} cos^{2q-2}
  const double sn = std::sin(t);
  const double cs = std::cos(t);
  const int p = params.p;
  const int q = params.q;
  auto term = [&](double coeff, int ps, int pc) {
    return coeff == 0.0 ? 0.0 : coeff * std::pow(sn, ps) * std::pow(cs, pc);
  };
  return params.lambda * (term(2.0 * p - 2.0, 2 * p - 3, 2 * q + 1) -
                          term(2.0 * q, 2 * p - 1, 2 * q - 1)) +
         params.mu * (term(2.0 * p, 2 * p - 1, 2 * q - 1) -
                      term(2.0 * q - 2.0, 2 * p + 1, 2 * q - 3));
}

JumpIntegrals jump_integrals(const Profile& interior, const Profile& exterior,
                             const HopfParams& params) {
  const int q = params.q;
  auto w0 = [&](double t) { return weight_flux_derivative(t, params); };
  auto w1 = [&](double t) { return std::sin(t) * std::pow(std::cos(t), 2 * q - 1); };
  auto w2 = [&](double t) {
    const double sn = std::sin(t);
    return sn * sn * sn * std::pow(std::cos(t), 2 * q - 3);
  };
  JumpIntegrals out;
  out.I_s = integral_on(interior, w0) + integral_on(exterior, w0);
  out.I_s1 = integral_on(interior, w1) + integral_on(exterior, w1);
  out.I_s2 = integral_on(interior, w2) + integral_on(exterior, w2);
  return out;
}

Profile GluedSolution::glued() const {
  Grid grid = Grid::join(beta.grid(), beta_star.grid());
  std::vector<double> v(beta.values().begin(), beta.values().end());
  v.insert(v.end(), beta_star.values().begin() + 1, beta_star.values().end());
  return Profile(std::move(grid), std::move(v), {}, JunctionSlopes{d_minus, d_plus});
}

GluedSolution glue(double s, const HopfParams& params, const SolverOptions& options) {
  return glue(s, params, interior_grid(s, options), exterior_grid(s, options), options);
}

GluedSolution glue(double s, const HopfParams& params, const Grid& interior,
                   const Grid& exterior, const SolverOptions& options) {
  const Minimizer in = minimize_interior(s, params, interior, options);
  const Minimizer ex = minimize_exterior(s, params, exterior, options);

  GluedSolution g{s, in.profile, ex.profile};
  const auto ti = interior.nodes();
  const auto ai = in.profile.values();
  const std::size_t m = ti.size();
  g.d_minus = fd::first_backward(ti[m - 1] - ti[m - 2], ti[m - 2] - ti[m - 3], ai[m - 3],
                                 ai[m - 2], ai[m - 1]);
  const auto te = exterior.nodes();
  const auto ae = ex.profile.values();
  g.d_plus = fd::first_forward(te[1] - te[0], te[2] - te[1], ae[0], ae[1], ae[2]);
  g.l = g.d_plus - g.d_minus;
  g.J_interior = in.energy;
  g.J_exterior = ex.energy;
  const auto ints = jump_integrals(in.profile, ex.profile, params);
  g.I_s = ints.I_s;
  g.I_s1 = ints.I_s1;
  g.I_s2 = ints.I_s2;
  g.interior_attached = in.attached;
  g.exterior_attached = ex.attached;
  g.monotone = in.monotone && ex.monotone;
  g.iterations = in.iterations + ex.iterations;
  g.l_tilde = g.d_minus + g.d_plus > 0.0 ? jump_via_integral(g, params) : 0.0;
  return g;
}

double jump_via_integral(const GluedSolution& glued, const HopfParams& params) {
  const double sum = glued.d_plus + glued.d_minus;
  if (std::abs(sum) < 1e-14) {
    throw DomainError("jump_via_integral: one-sided slopes sum to zero");
  }
  const double f = weight_f(glued.s, params);
  return glued.I_s / (f * f * sum);
}

}  // namespace hopf
