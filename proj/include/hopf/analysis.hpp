#pragma once

// Experiments on the glued family: jump scans, root finding, blow-up limits,
// the I_s^1 / I_s^2 estimates and the comparison lemma.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hopf/variational.hpp"

namespace hopf {

struct AnalysisOptions {
  SolverOptions solver;
  double s_min = 0.01;
  double s_max = 1.5;
  std::size_t scan_points = 40;
  double root_tol = 1e-6;        // |l(s_star)|
  int max_bisections = 100;
  double residual_tol = 1e-4;    // |r| / (1 + Q), away from the endpoints
  double residual_margin = 1e-2; // nodes closer than this to 0 or pi/2 are not checked
  double boundary_tol = 1e-3;
  std::size_t threads = 1;
};

struct ScanRow {
  double s = 0.0;
  double l = 0.0;
  double l_tilde = 0.0;
  double I_s = 0.0;
  double I_s1 = 0.0;
  double I_s2 = 0.0;
  bool converged = false;
  std::string error;
};

struct Bracket {
  double s_lo, s_hi;
  double l_lo, l_hi;
};

struct ScanResult {
  HopfParams params;
  std::vector<ScanRow> rows;        // sorted by s
  std::vector<Bracket> brackets;    // adjacent converged rows with opposite signs of l
  std::optional<double> s_star;     // a scanned s with |l| <= root_tol, if any
  std::size_t failures() const;
};

/// n glued solves at geometrically spaced s in [s_min, s_max]. Solver failures
/// become rows with converged = false.
ScanResult scan_jump(const HopfParams& params, double s_min, double s_max, std::size_t n,
                     const AnalysisOptions& options = {});

/// `s,l,l_tilde,I_s,I_s1,I_s2,converged`
void write_scan_csv(std::ostream& out, const ScanResult& scan);

enum class Verdict { solution_found, no_sign_change, inconclusive };
std::string_view to_string(Verdict v);

struct SolveOutcome {
  Verdict verdict = Verdict::inconclusive;
  ScanResult scan;
  std::optional<GluedSolution> solution;
  double max_residual = 0.0;
  int bisections = 0;
  std::string message;
};

/// Scan over [s_min, s_max], then bisection on the first bracket until
/// |l| <= root_tol. A solution is reported only if the glued profile passes
/// the residual and boundary checks.
SolveOutcome find_solution(const HopfParams& params, const AnalysisOptions& options = {});

/// Largest ODE residual relative to 1 + Q(t) over nodes at least `margin` away
/// from 0 and pi/2, skipping the junction. Q sets the size of every term of
/// the equation near the singular endpoints.
double interior_residual(const Profile& glued, const HopfParams& params, double margin);

/// sup |a(t) - b(t)| over the nodes of `a` inside the range of `b`, with b interpolated.
double sup_distance(const Profile& a, const Profile& b);

/// sup over nodes t with t/s in [eps, 1/eps] of |a_s(t) - phi(t/s)|, phi the
/// limit solution pinned at 1. Requires s/eps < pi/2.
double blowup_compare(double s, const HopfParams& params, double eps,
                      const SolverOptions& solver = {});

/// s^{-2} I_s^1 for each s.
std::vector<double> estimate_Is1_trend(const HopfParams& params, std::span<const double> s,
                                       const SolverOptions& solver = {},
                                       std::size_t threads = 1);

struct Is2Estimate {
  double s = 0.0;
  double split = 0.0;     // largest grid node <= R s
  double A_s = 0.0;       // int over [split, pi/2)
  double B_s = 0.0;       // int over (0, split]
  double I_s1 = 0.0;
  double I_s2 = 0.0;
  double ratio = 0.0;     // I_s2 / I_s1
  double B_bound = 0.0;   // tan^2(R s) I_s1
  double A_bound = 0.0;   // same integral with sin^2 psi_{ds} in place of sin^2 a
  bool B_bound_holds = false;
};

Is2Estimate estimate_Is2(const HopfParams& params, double s, double R, double d,
                         const SolverOptions& solver = {});

/// Largest d in (1, R) with psi_{ds}(R s) >= max(theta, 3 pi/4) + 0.01, or nullopt.
std::optional<double> choose_d(double s, double R, const HopfParams& params);

struct ComparisonReport {
  bool hypothesis_met = false;
  double alpha_t0 = 0.0;
  double psi_t0 = 0.0;
  double threshold = 0.0;       // max(theta, 3 pi / 4)
  double min_margin = 0.0;      // min over nodes in (t0, pi/2) of a - psi_{ds}
  bool ordering_holds = false;  // min_margin >= -1e-6
  double min_supersolution = 0.0;  // over nodes with psi > theta
  bool supersolution_positive = false;
  std::size_t nodes_checked = 0;
};

ComparisonReport comparison_check(double s, double d, double t0, const HopfParams& params,
                                  const SolverOptions& solver = {});
/// Same check against an already computed glued solution.
ComparisonReport comparison_check(const GluedSolution& glued, double d, double t0,
                                  const HopfParams& params);

struct JunctionAsymptotics {
  double alpha_error = 0.0;  // |cos a_s(R s) - (-1 + 2/(1 + R^a))|
  double psi_error = 0.0;    // |cos psi_{ds}(R s) - (-1 + 2/(1 + (R/d)^a))|
  double alpha_limit = 0.0;
  double psi_limit = 0.0;
};

JunctionAsymptotics junction_asymptotics_check(double s, double R, double d,
                                               const HopfParams& params,
                                               const SolverOptions& solver = {});

struct SolvabilityCell {
  double lambda = 0.0;
  double mu = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::optional<double> s_star;
  double max_residual = 0.0;
  std::string message;
};

/// find_solution on an n_lambda x n_mu grid (lambda outer, endpoints included);
/// cells run concurrently on options.threads workers.
std::vector<SolvabilityCell> solvability_map(int p, int q, double lambda_min, double lambda_max,
                                             double mu_min, double mu_max,
                                             std::size_t n_lambda, std::size_t n_mu,
                                             const AnalysisOptions& options = {});

/// `lambda,mu,verdict,s_star`
void write_map_csv(std::ostream& out, std::span<const SolvabilityCell> cells);

}  // namespace hopf
