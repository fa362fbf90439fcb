// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "cli.hpp"
#include "hopf/analysis.hpp"
#include "hopf/closed_forms.hpp"
#include "hopf/hopf_map.hpp"
#include "hopf/oracle_suite.hpp"
#include "hopf/shooting.hpp"

using namespace hopf;

namespace {

// Tolerances and runtime budgets, pinned.
constexpr double kOracleResidualTol = 1e-6;
constexpr double kIdentityTol = 1e-8;
constexpr double kConstantTol = 1e-8;
constexpr double kExactSupTol = 1e-6;
constexpr double kExactJumpTol = 1e-5;
constexpr double kRootTol = 1e-6;
constexpr double kPipelineAgreement = 1e-4;
constexpr double kEndpointTol = 1e-3;
constexpr double kMapMargin = 0.2;
constexpr double kBlowupBound = 0.05;
constexpr double kIs1Fraction = 0.95;
constexpr double kOrderingSlack = 1e-6;
constexpr double kNormTol = 1e-12;
constexpr double kHopfNormTol = 1e-10;

constexpr double kBudget1 = 5.0;
constexpr double kBudget2 = 10.0;
constexpr double kBudget3 = 60.0;
constexpr double kBudget6 = 900.0;

const HopfParams kMain = HopfParams::make(1, 2, 1, 4);

struct Outcome {
  bool pass = false;
  std::string detail;
};

double norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

double sup_error_2t(const Profile& p) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    m = std::max(m, std::abs(p.values()[i] - 2.0 * p.grid()[i]));
  }
  return m;
}

Outcome oracle_suite(double elapsed_budget) {
  const auto start = std::chrono::steady_clock::now();
  const auto rows = run_oracle_suite();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool ok = !rows.empty();
  double worst_residual = 0.0, worst_identity = 0.0, worst_constant = 0.0;
  for (const auto& r : rows) {
    double tol = kOracleResidualTol;
    double* worst = &worst_residual;
    if (r.name.find("identity") != std::string::npos) {
      tol = kIdentityTol;
      worst = &worst_identity;
    } else if (r.name.find("A(") != std::string::npos) {
      tol = kConstantTol;
      worst = &worst_constant;
    }
    *worst = std::max(*worst, r.max_residual);
    ok = ok && r.max_residual <= tol && r.pass();
  }
  ok = ok && secs < elapsed_budget;
  return {ok, fmt::format("{} rows, residual {:.2e}, identity {:.2e}, A {:.2e}, {:.2f}s",
                          rows.size(), worst_residual, worst_identity, worst_constant, secs)};
}

Outcome exact_recovery() {
  const auto hp = HopfParams::make(1, 1, 1, 1);
  const GluedSolution g = glue(kPi / 4, hp);
  const double e_var = sup_error_2t(g.glued());
  const ShootingResult sh = match_shooting(hp);
  const double e_shoot = sh.profile ? sup_error_2t(*sh.profile) : INFINITY;
  const ScanResult scan = scan_jump(hp, 0.2, 1.2, 5);
  double worst_l = 0.0;
  for (const auto& r : scan.rows) worst_l = std::max(worst_l, r.converged ? std::abs(r.l) : INFINITY);
  const bool ok = e_var <= kExactSupTol && e_shoot <= kExactSupTol && worst_l <= kExactJumpTol &&
                  scan.rows.size() == 5;
  return {ok, fmt::format("variational {:.2e}, shooting {:.2e}, max |l| {:.2e}", e_var, e_shoot,
                          worst_l)};
}

Outcome main_regime() {
  AnalysisOptions o;
  o.root_tol = kRootTol;
  const SolveOutcome out = find_solution(kMain, o);
  if (out.verdict != Verdict::solution_found || !out.solution) {
    return {false, fmt::format("verdict {}: {}", to_string(out.verdict), out.message)};
  }
  const Profile glued = out.solution->glued();
  const ShootingResult sh = match_shooting(kMain);
  const double dist = sh.profile ? sup_distance(glued, *sh.profile) : INFINITY;
  const auto v = glued.values();
  const bool ends = v.front() <= kEndpointTol && v.back() >= kPi - kEndpointTol;
  const bool ok = !out.scan.brackets.empty() && std::abs(out.solution->l) <= kRootTol &&
                  dist <= kPipelineAgreement && glued.strictly_increasing() && ends;
  return {ok, fmt::format("s* {:.6f}, |l| {:.2e}, glued vs shooting {:.2e}, ends {:.1e}/{:.1e}",
                          out.solution->s, std::abs(out.solution->l), dist, v.front(),
                          kPi - v.back())};
}

Outcome sign_structure(const std::filesystem::path& dir) {
  std::ostringstream out, err;
  const int code = cli::run({"scan-jump", "--p", "1", "--q", "2", "--lambda", "1", "--mu", "4",
                             "--s-min", "0.01", "--s-max", "1.5", "--n", "40", "--out",
                             (dir / "c4").string()},
                            out, err);
  const ScanResult scan = scan_jump(kMain, 0.01, 1.5, 40);
  bool ok = code == cli::kOk && scan.rows.size() == 40;
  for (std::size_t i = 0; i < 3 && i < scan.rows.size(); ++i) {
    const auto& r = scan.rows[i];
    ok = ok && r.converged && r.l > 0.0 && r.I_s > 0.0;
  }
  std::size_t near = 0;
  for (const auto& r : scan.rows) {
    if (kHalfPi - r.s <= 0.1) {
      ++near;
      ok = ok && r.converged && r.l < 0.0;
    }
  }
  ok = ok && near > 0;
  return {ok, fmt::format("l(s_0..2) = {:.3e} {:.3e} {:.3e}; {} rows near pi/2, l(s_max) = {:.3e}",
                          scan.rows[0].l, scan.rows[1].l, scan.rows[2].l, near,
                          scan.rows.back().l)};
}

Outcome necessary_condition(const std::filesystem::path& dir) {
  bool ok = true;
  std::string detail;
  for (const char* mu : {"1.5", "1.9"}) {
    std::ostringstream out, err;
    const int code = cli::run({"scan-jump", "--p", "1", "--q", "2", "--lambda", "1", "--mu", mu,
                               "--s-min", "0.01", "--s-max", "1.5", "--n", "40", "--out",
                               (dir / fmt::format("c5_{}", mu)).string()},
                              out, err);
    ok = ok && code == cli::kNoSignChange;
    detail += fmt::format("mu={} exit {}; ", mu, code);
  }
  return {ok, detail};
}

Outcome solvability(double budget) {
  AnalysisOptions o;
  o.threads = 4;
  const auto start = std::chrono::steady_clock::now();
  const auto cells = solvability_map(1, 2, 1.0, 2.0, 1.0, 6.0, 5, 10, o);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  int above = 0, below = 0, bad = 0;
  std::string first_bad;
  for (const auto& c : cells) {
    const double edge = c.lambda * 2;
    Verdict want;
    if (c.mu > edge + kMapMargin) {
      want = Verdict::solution_found;
      ++above;
    } else if (c.mu < edge - kMapMargin) {
      want = Verdict::no_sign_change;
      ++below;
    } else {
      continue;
    }
    if (c.verdict != want) {
      if (bad++ == 0) {
        first_bad = fmt::format(" first (l={:.3g}, m={:.3g}) {}", c.lambda, c.mu,
                                to_string(c.verdict));
      }
    }
  }
  const bool ok = cells.size() == 50 && bad == 0 && secs < budget;
  return {ok, fmt::format("{} above, {} below, {} wrong{}, {:.1f}s", above, below, bad, first_bad,
                          secs)};
}

Outcome blowup() {
  std::vector<double> d;
  for (double s : {0.04, 0.02, 0.01}) d.push_back(blowup_compare(s, kMain, 0.1));
  const bool ok = d[1] < d[0] && d[2] < d[1] && d[2] <= kBlowupBound;
  return {ok, fmt::format("{:.3e} {:.3e} {:.3e}", d[0], d[1], d[2])};
}

Outcome is1_asymptotics() {
  const double one[] = {0.01};
  const double A = blowup_constant(4.0).value;
  const double v4 = estimate_Is1_trend(HopfParams::make(1, 2, 4, 12), one).front();
  const double dyadic[] = {0.04, 0.02, 0.01, 0.005};
  const auto v1 = estimate_Is1_trend(kMain, dyadic);
  bool inc = true;
  for (std::size_t i = 1; i < v1.size(); ++i) inc = inc && v1[i] > v1[i - 1];
  const bool ok = v4 >= kIs1Fraction * kHalfPi && inc;
  return {ok, fmt::format("lambda=4: {:.5f} (A = {:.5f}); lambda=1: {:.3f} {:.3f} {:.3f} {:.3f}",
                          v4, A, v1[0], v1[1], v1[2], v1[3])};
}

Outcome comparison() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> us(0.005, 0.05);
  std::uniform_real_distribution<double> ud(1.2, 10.0);
  std::uniform_real_distribution<double> ulift(0.01, 0.5);
  const double threshold = std::max(theta_threshold(kMain), 3 * kPi / 4);
  const double a = 2 * std::sqrt(kMain.lambda);
  int accepted = 0, tried = 0, failed = 0;
  double worst_margin = INFINITY, worst_super = INFINITY;
  while (accepted < 10 && tried < 200) {
    ++tried;
    const double s = us(rng);
    const double d = ud(rng);
    const double target = std::min(threshold + ulift(rng), kPi - 1e-3);
    // psi_{ds}(t0) = target
    const double t0 = std::atan(std::tan(d * s) * std::pow(std::tan(target / 2), 2 / a));
    if (!(t0 > 0 && t0 < kHalfPi)) continue;
    const ComparisonReport r = comparison_check(s, d, t0, kMain);
    if (!r.hypothesis_met) continue;
    ++accepted;
    worst_margin = std::min(worst_margin, r.min_margin);
    worst_super = std::min(worst_super, r.min_supersolution);
    if (r.min_margin < -kOrderingSlack || !r.supersolution_positive) ++failed;
  }
  const bool ok = accepted == 10 && failed == 0;
  return {ok, fmt::format("{} configs ({} drawn), min margin {:.2e}, min supersolution {:.2e}",
                          accepted, tried, worst_margin, worst_super)};
}

Outcome eigenmap_algebra() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n;
  double worst_norm = 0.0;
  for (const auto& m :
       {OrthogonalMultiplication::complex(), OrthogonalMultiplication::quaternion(),
        OrthogonalMultiplication::octonion(), OrthogonalMultiplication::restricted(3, 4),
        OrthogonalMultiplication::restricted(5, 6), OrthogonalMultiplication::restricted(9, 10)}) {
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> x(m.k()), y(m.l());
      for (double& v : x) v = n(rng);
      for (double& v : y) v = n(rng);
      const double nx = norm(x), ny = norm(y);
      worst_norm = std::max(worst_norm, std::abs(norm(m(x, y)) - nx * ny) / (nx * ny));
    }
  }

  bool traces = true;
  std::vector<int> eig;
  for (const auto& m : {OrthogonalMultiplication::complex(), OrthogonalMultiplication::quaternion(),
                        OrthogonalMultiplication::octonion()}) {
    try {
      const EigenvalueReport r = eigenvalue_check(m);
      for (auto t : r.hessian_traces) traces = traces && t == 0;
      eig.push_back(r.eigenvalue);
    } catch (const std::exception&) {
      traces = false;
      eig.push_back(-1);
    }
  }

  const ShootingResult sh = match_shooting(kMain);
  double hopf_norm = INFINITY;
  if (sh.profile) {
    const BiEigenmap f(1, MulKind::complex);
    hopf_norm = sample_alpha_hopf(*sh.profile, f, 10000, rng).max_norm_error;
  }
  const bool ok = worst_norm <= kNormTol && traces && eig == std::vector<int>{8, 16, 32} &&
                  hopf_norm <= kHopfNormTol;
  return {ok, fmt::format("norm {:.2e}, traces {}, eigenvalues {} {} {}, hopf norm {:.2e}",
                          worst_norm, traces ? "zero" : "nonzero", eig[0], eig[1], eig[2],
                          hopf_norm)};
}

}  // namespace

int main() {
  const auto dir = std::filesystem::temp_directory_path() / "hopf_acceptance";
  std::filesystem::create_directories(dir);

  struct Criterion {
    const char* name;
    double budget;  // seconds; 0 for none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"oracle suite", kBudget1, [] { return oracle_suite(kBudget1); }},
      {"exact solution recovery", kBudget2, exact_recovery},
      {"solvable regime", kBudget3, main_regime},
      {"sign structure of l", 0, [&] { return sign_structure(dir); }},
      {"necessary condition", 0, [&] { return necessary_condition(dir); }},
      {"solvability map", kBudget6, [] { return solvability(kBudget6); }},
      {"blow-up convergence", 0, blowup},
      {"I_s^1 asymptotics", 0, is1_asymptotics},
      {"comparison lemma", 0, comparison},
      {"eigenmap algebra", 0, eigenmap_algebra},
  };

  int failures = 0;
  int index = 1;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget > 0 && secs >= c.budget) {
      o.pass = false;
      o.detail += fmt::format(" (over budget {:.0f}s)", c.budget);
    }
    if (!o.pass) ++failures;
    fmt::print("[{}] {:2d} {:<24} {:7.2f}s  {}\n", o.pass ? "PASS" : "FAIL", index++, c.name, secs,
               o.detail);
    std::fflush(stdout);
  }
  std::filesystem::remove_all(dir);
  fmt::print("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures;
}
