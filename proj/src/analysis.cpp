#include "hopf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "hopf/closed_forms.hpp"
#include "hopf/errors.hpp"
#include "hopf/quadrature.hpp"
#include "hopf/task_pool.hpp"

namespace hopf {

namespace {

std::vector<double> geometric(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  v.back() = hi;
  return v;
}

std::vector<double> linear(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

ScanRow row_of(const GluedSolution& g) {
  return {g.s, g.l, g.l_tilde, g.I_s, g.I_s1, g.I_s2, true, {}};
}

// int over nodes [first, last] of w(t) sin^2 a(t) on one side of the junction.
template <class W>
double side_integral(const Profile& side, std::size_t first, std::size_t last, W&& w) {
  const auto t = side.grid().nodes().subspan(first, last - first + 1);
  const auto a = side.values().subspan(first, last - first + 1);
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double s = std::sin(a[i]);
    y[i] = w(t[i]) * s * s;
  }
  return simpson(t, y);
}

std::size_t last_node_at_most(std::span<const double> t, double x) {
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  return it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
}

}  // namespace

std::size_t ScanResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ScanRow& r) { return !r.converged; }));
}

ScanResult scan_jump(const HopfParams& params, double s_min, double s_max, std::size_t n,
                     const AnalysisOptions& options) {
  if (!(s_min > 0.0 && s_min < s_max && s_max < kHalfPi) || n < 2) {
    throw DomainError(
        fmt::format("scan_jump: need 0 < s_min < s_max < pi/2 and n >= 2 (got {}, {}, {})",
                    s_min, s_max, n));
  }
  ScanResult out;
  out.params = params;
  const auto s = geometric(s_min, s_max, n);
  out.rows.resize(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    try {
      out.rows[i] = row_of(glue(s[i], params, options.solver));
    } catch (const std::exception& e) {
      out.rows[i] = ScanRow{};
      out.rows[i].s = s[i];
      out.rows[i].l = std::numeric_limits<double>::quiet_NaN();
      out.rows[i].l_tilde = out.rows[i].l;
      out.rows[i].error = e.what();
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = out.rows[i];
    if (r.converged && std::abs(r.l) <= options.root_tol && !out.s_star) out.s_star = r.s;
    if (i + 1 < n) {
      const auto& q = out.rows[i + 1];
      if (r.converged && q.converged && r.l * q.l < 0.0) {
        out.brackets.push_back({r.s, q.s, r.l, q.l});
      }
    }
  }
  return out;
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
  out << "s,l,l_tilde,I_s,I_s1,I_s2,converged\n";
  for (const auto& r : scan.rows) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.s, r.l,
                       r.l_tilde, r.I_s, r.I_s1, r.I_s2, r.converged ? 1 : 0);
  }
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::solution_found:
      return "solution_found";
    case Verdict::no_sign_change:
      return "no_sign_change";
    case Verdict::inconclusive:
      break;
  }
  return "inconclusive";
}

double interior_residual(const Profile& glued, const HopfParams& params, double margin) {
  const auto r = residual(glued, params);
  const auto t = glued.grid().nodes();
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < margin || t[i] > kHalfPi - margin || std::isnan(r[i])) continue;
    m = std::max(m, std::abs(r[i]) / (1.0 + coeff_Q(t[i], params)));
  }
  return m;
}

SolveOutcome find_solution(const HopfParams& params, const AnalysisOptions& options) {
  SolveOutcome out;
  out.scan = scan_jump(params, options.s_min, options.s_max, options.scan_points, options);
  const ScanResult& scan = out.scan;

  std::optional<GluedSolution> root;
  try {
    // p = q = 1 with lambda = mu: the equation is autonomous in log tan t, so
    // every s carries a solution. Report the member pinned at pi/4.
    const bool family = params.p == 1 && params.q == 1 && params.lambda == params.mu;
    if (family && options.s_min <= kPi / 4 && kPi / 4 <= options.s_max) {
      root = glue(kPi / 4, params, options.solver);
      out.message = "one-parameter family; reporting the member with s = pi/4";
    } else if (scan.s_star) {
      root = glue(*scan.s_star, params, options.solver);
    } else if (!scan.brackets.empty()) {
      Bracket b = scan.brackets.front();
      for (; out.bisections < options.max_bisections; ++out.bisections) {
        const double mid = 0.5 * (b.s_lo + b.s_hi);
        GluedSolution g = glue(mid, params, options.solver);
        if (std::abs(g.l) <= options.root_tol) {
          root = std::move(g);
          ++out.bisections;
          break;
        }
        if ((g.l > 0.0) == (b.l_lo > 0.0)) {
          b.s_lo = mid;
          b.l_lo = g.l;
        } else {
          b.s_hi = mid;
          b.l_hi = g.l;
        }
      }
      if (!root) {
        out.verdict = Verdict::inconclusive;
        out.message = fmt::format(
            "bisection stalled on [{:.17g}, {:.17g}] with l in [{:.3e}, {:.3e}]", b.s_lo,
            b.s_hi, b.l_lo, b.l_hi);
        return out;
      }
    }
  } catch (const std::exception& e) {
    out.verdict = Verdict::inconclusive;
    out.message = fmt::format("solver failure during root refinement: {}", e.what());
    return out;
  }

  if (!root) {
    if (2 * scan.failures() > scan.rows.size()) {
      out.verdict = Verdict::inconclusive;
      out.message = fmt::format("{} of {} scan rows failed", scan.failures(), scan.rows.size());
    } else {
      out.verdict = Verdict::no_sign_change;
      out.message = "l(s) keeps one sign over the scanned range";
    }
    return out;
  }

  const Profile glued = root->glued();
  out.max_residual = interior_residual(glued, params, options.residual_margin);
  const auto v = glued.values();
  const bool bc = v.front() <= options.boundary_tol && v.back() >= kPi - options.boundary_tol;
  out.solution = std::move(root);
  if (out.max_residual > options.residual_tol) {
    out.verdict = Verdict::inconclusive;
    out.message = fmt::format("residual {:.3e} above {:.1e}", out.max_residual,
                              options.residual_tol);
  } else if (!bc || !glued.strictly_increasing()) {
    out.verdict = Verdict::inconclusive;
    out.message = "boundary values or monotonicity not met";
  } else {
    out.verdict = Verdict::solution_found;
  }
  return out;
}

double sup_distance(const Profile& a, const Profile& b) {
  const auto t = a.grid().nodes();
  const auto v = a.values();
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < b.grid().front() || t[i] > b.grid().back()) continue;
    m = std::max(m, std::abs(v[i] - b(t[i])));
  }
  return m;
}

double blowup_compare(double s, const HopfParams& params, double eps,
                      const SolverOptions& solver) {
  if (!(eps > 0.0 && eps < 1.0) || !(s > 0.0 && s / eps < kHalfPi)) {
    throw DomainError(fmt::format("blowup_compare: need 0 < eps < 1 and s/eps < pi/2 "
                                  "(s = {}, eps = {})", s, eps));
  }
  const Profile g = glue(s, params, solver).glued();
  const auto t = g.grid().nodes();
  const auto v = g.values();
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = t[i] / s;
    if (x < eps || x > 1.0 / eps) continue;
    m = std::max(m, std::abs(v[i] - phi_limit(x, 1.0, params.lambda)));
  }
  return m;
}

std::vector<double> estimate_Is1_trend(const HopfParams& params, std::span<const double> s,
                                       const SolverOptions& solver, std::size_t threads) {
  std::vector<double> out(s.size());
  parallel_for(s.size(), threads, [&](std::size_t i) {
    out[i] = glue(s[i], params, solver).I_s1 / (s[i] * s[i]);
  });
  return out;
}

Is2Estimate estimate_Is2(const HopfParams& params, double s, double R, double d,
                         const SolverOptions& solver) {
  if (!(d > 1.0) || !(R > 1.0) || !(R * s < kHalfPi)) {
    throw DomainError(fmt::format("estimate_Is2: need d > 1, R > 1, R s < pi/2 "
                                  "(s = {}, R = {}, d = {})", s, R, d));
  }
  const GluedSolution g = glue(s, params, solver);
  const int q = params.q;
  auto w2 = [q](double t) {
    const double sn = std::sin(t);
    return sn * sn * sn * std::pow(std::cos(t), 2 * q - 3);
  };
  const Profile& in = g.beta;
  const Profile& ex = g.beta_star;
  const std::size_t ni = in.size();
  const std::size_t ne = ex.size();
  Is2Estimate e;
  e.s = s;
  const double rs = R * s;
  if (rs >= s) {
    const std::size_t k = last_node_at_most(ex.grid().nodes(), rs);
    e.split = ex.grid()[k];
    e.B_s = side_integral(in, 0, ni - 1, w2) + (k > 0 ? side_integral(ex, 0, k, w2) : 0.0);
    e.A_s = side_integral(ex, k, ne - 1, w2);
    const double ds = d * s;
    if (ds < kHalfPi) {
      const auto t = ex.grid().nodes().subspan(k);
      std::vector<double> y(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) {
        y[i] = w2(t[i]) * sin2_psi_closed(t[i], ds, params.lambda);
      }
      e.A_bound = simpson(t, y);
    } else {
      e.A_bound = std::numeric_limits<double>::quiet_NaN();
    }
  } else {
    const std::size_t k = last_node_at_most(in.grid().nodes(), rs);
    e.split = in.grid()[k];
    e.B_s = k > 0 ? side_integral(in, 0, k, w2) : 0.0;
    e.A_s = side_integral(in, k, ni - 1, w2) + side_integral(ex, 0, ne - 1, w2);
    e.A_bound = std::numeric_limits<double>::quiet_NaN();
  }
  e.I_s1 = g.I_s1;
  e.I_s2 = g.I_s2;
  e.ratio = g.I_s2 / g.I_s1;
  const double tr = std::tan(rs);
  e.B_bound = tr * tr * g.I_s1;
  e.B_bound_holds = e.B_s <= e.B_bound;
  return e;
}

std::optional<double> choose_d(double s, double R, const HopfParams& params) {
  const double target = std::max(theta_threshold(params), 0.75 * kPi) + 0.01;
  const double rs = R * s;
  if (!(rs < kHalfPi) || !(R > 1.0)) return std::nullopt;
  // psi_{ds}(R s) decreases in d; d must also keep d s inside (0, pi/2).
  double lo = 1.0;
  double hi = std::min(R, kHalfPi / s * (1.0 - 1e-12));
  auto psi_at = [&](double d) { return psi_comparison(rs, d * s, params.lambda); };
  if (psi_at(lo * (1.0 + 1e-12)) < target) return std::nullopt;
  if (psi_at(hi) >= target) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (psi_at(mid) >= target ? lo : hi) = mid;
  }
  return lo;
}

ComparisonReport comparison_check(const GluedSolution& glued, double d, double t0,
                                  const HopfParams& params) {
  const double s = glued.s;
  const double ds = d * s;
  if (!(ds > 0.0 && ds < kHalfPi) || !(t0 > 0.0 && t0 < kHalfPi)) {
    throw DomainError(fmt::format("comparison_check: need d s and t0 in (0, pi/2) "
                                  "(d s = {}, t0 = {})", ds, t0));
  }
  const double theta = theta_threshold(params);
  const Profile g = glued.glued();
  ComparisonReport r;
  r.threshold = std::max(theta, 0.75 * kPi);
  r.alpha_t0 = g(t0);
  r.psi_t0 = psi_comparison(t0, ds, params.lambda);
  r.hypothesis_met = r.alpha_t0 > r.psi_t0 && r.psi_t0 > r.threshold;

  const auto t = g.grid().nodes();
  const auto v = g.values();
  r.min_margin = std::numeric_limits<double>::infinity();
  r.min_supersolution = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > t0)) continue;
    const double psi = psi_comparison(t[i], ds, params.lambda);
    r.min_margin = std::min(r.min_margin, v[i] - psi);
    if (psi > theta) {
      r.min_supersolution =
          std::min(r.min_supersolution, comparison_supersolution(t[i], psi, params));
    }
    ++r.nodes_checked;
  }
  r.ordering_holds = r.nodes_checked > 0 && r.min_margin >= -1e-6;
  r.supersolution_positive = r.min_supersolution > 0.0;
  return r;
}

ComparisonReport comparison_check(double s, double d, double t0, const HopfParams& params,
                                  const SolverOptions& solver) {
  return comparison_check(glue(s, params, solver), d, t0, params);
}

JunctionAsymptotics junction_asymptotics_check(double s, double R, double d,
                                               const HopfParams& params,
                                               const SolverOptions& solver) {
  const double rs = R * s;
  if (!(rs < kHalfPi / 2.0) || !(d * s < kHalfPi)) {
    throw DomainError(fmt::format("junction_asymptotics_check: need R s < pi/4 and d s < pi/2 "
                                  "(R s = {}, d s = {})", rs, d * s));
  }
  const Profile g = glue(s, params, solver).glued();
  const double a = params.a;
  JunctionAsymptotics j;
  j.alpha_limit = -1.0 + 2.0 / (1.0 + std::pow(R, a));
  j.psi_limit = -1.0 + 2.0 / (1.0 + std::pow(R / d, a));
  j.alpha_error = std::abs(std::cos(g(rs)) - j.alpha_limit);
  j.psi_error = std::abs(std::cos(psi_comparison(rs, d * s, params.lambda)) - j.psi_limit);
  return j;
}

std::vector<SolvabilityCell> solvability_map(int p, int q, double lambda_min, double lambda_max,
                                             double mu_min, double mu_max,
                                             std::size_t n_lambda, std::size_t n_mu,
                                             const AnalysisOptions& options) {
  if (!(lambda_min > 0.0 && lambda_min <= lambda_max && mu_min > 0.0 && mu_min <= mu_max) ||
      n_lambda == 0 || n_mu == 0) {
    throw DomainError("solvability_map: ranges must be positive and non-empty");
  }
  const auto lambdas = linear(lambda_min, lambda_max, n_lambda);
  const auto mus = linear(mu_min, mu_max, n_mu);
  std::vector<SolvabilityCell> cells(n_lambda * n_mu);
  AnalysisOptions inner = options;
  inner.threads = 1;
  parallel_for(cells.size(), options.threads, [&](std::size_t k) {
    SolvabilityCell& c = cells[k];
    c.lambda = lambdas[k / n_mu];
    c.mu = mus[k % n_mu];
    try {
      const SolveOutcome o = find_solution(HopfParams::make(p, q, c.lambda, c.mu), inner);
      c.verdict = o.verdict;
      if (o.solution) c.s_star = o.solution->s;
      c.max_residual = o.max_residual;
      c.message = o.message;
    } catch (const std::exception& e) {
      c.verdict = Verdict::inconclusive;
      c.message = e.what();
    }
  });
  return cells;
}

void write_map_csv(std::ostream& out, std::span<const SolvabilityCell> cells) {
  out << "lambda,mu,verdict,s_star\n";
  for (const auto& c : cells) {
    out << fmt::format("{:.17g},{:.17g},{},{}\n", c.lambda, c.mu, to_string(c.verdict),
                       c.s_star ? fmt::format("{:.17g}", *c.s_star) : std::string{});
  }
}

}  // namespace hopf
