#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "hopf/closed_forms.hpp"
#include "hopf/errors.hpp"
#include "hopf/hopf_map.hpp"
#include "hopf/oracle_suite.hpp"
#include "hopf/shooting.hpp"
#include "hopf/task_pool.hpp"

namespace hopf::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

Range parse_range(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) {
      throw std::invalid_argument(fmt::format("bad number '{}' in range '{}'", s, text));
    }
    return v;
  };
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() == 1) {
    const double v = number(parts[0]);
    return {v, v, 1};
  }
  if (parts.size() != 3) {
    throw std::invalid_argument(fmt::format("range '{}' is not min:max:count", text));
  }
  Range r{number(parts[0]), number(parts[1]), 0};
  const double c = number(parts[2]);
  if (!(c >= 1.0) || c != std::floor(c)) {
    throw std::invalid_argument(fmt::format("range count in '{}' must be a positive integer", text));
  }
  r.count = static_cast<std::size_t>(c);
  if (r.count > 1 && !(r.min < r.max)) {
    throw std::invalid_argument(fmt::format("range '{}' needs min < max", text));
  }
  return r;
}

std::map<std::string, std::string> read_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  int number = 0;
  for (std::string line; std::getline(in, line);) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(fmt::format("config line {}: expected key=value", number));
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) throw std::runtime_error(fmt::format("config line {}: empty key", number));
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

void RunConfig::validate() const {
  const auto& s = analysis.solver;
  if (s.nodes_per_side < 16) throw std::invalid_argument("--nodes must be at least 16");
  for (auto [name, v] : {std::pair{"gradient-tol", s.gradient_tol}, {"step-tol", s.step_tol},
                         {"root-tol", analysis.root_tol}, {"residual-tol", analysis.residual_tol},
                         {"boundary-tol", analysis.boundary_tol}}) {
    if (!(v > 0.0)) throw std::invalid_argument(fmt::format("--{} must be positive", name));
  }
  if (analysis.threads == 0) throw std::invalid_argument("--threads must be positive");
}

namespace {

struct Context {
  std::string command;
  RunConfig cfg;
  std::ostream& out;
  std::ostream& err;
  ordered_json summary = ordered_json::object();
  std::vector<std::string> files;

  fs::path file(const std::string& name) {
    files.push_back(name);
    return cfg.out_dir / name;
  }
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  return f;
}

ordered_json params_json(const RunConfig& c) {
  return {{"p", c.p}, {"q", c.q}, {"lambda", c.lambda}, {"mu", c.mu}};
}

ordered_json options_json(const RunConfig& c) {
  const auto& a = c.analysis;
  return {{"nodes_per_side", a.solver.nodes_per_side},
          {"endpoint_gap", a.solver.endpoint_gap},
          {"gradient_tol", a.solver.gradient_tol},
          {"step_tol", a.solver.step_tol},
          {"max_iterations", a.solver.max_iterations},
          {"s_min", a.s_min},
          {"s_max", a.s_max},
          {"scan_points", a.scan_points},
          {"root_tol", a.root_tol},
          {"max_bisections", a.max_bisections},
          {"residual_tol", a.residual_tol},
          {"residual_margin", a.residual_margin},
          {"boundary_tol", a.boundary_tol},
          {"threads", a.threads},
          {"out_dir", c.out_dir.string()}};
}

ordered_json glued_json(const GluedSolution& g) {
  return {{"s", g.s},
          {"l", g.l},
          {"l_tilde", g.l_tilde},
          {"d_minus", g.d_minus},
          {"d_plus", g.d_plus},
          {"I_s", g.I_s},
          {"I_s1", g.I_s1},
          {"I_s2", g.I_s2},
          {"J_interior", g.J_interior},
          {"J_exterior", g.J_exterior},
          {"interior_attached", g.interior_attached},
          {"exterior_attached", g.exterior_attached},
          {"monotone", g.monotone},
          {"iterations", g.iterations}};
}

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

void write_json(const fs::path& path, const ordered_json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

int cmd_solve(Context& ctx, bool shoot) {
  const auto& c = ctx.cfg;
  const HopfParams params = HopfParams::make(c.p, c.q, c.lambda, c.mu);
  const SolveOutcome o = find_solution(params, c.analysis);
  {
    auto f = open_out(ctx.file("scan.csv"));
    write_scan_csv(f, o.scan);
  }
  ctx.summary["verdict"] = to_string(o.verdict);
  ctx.summary["s_star"] = o.solution ? ordered_json(o.solution->s) : ordered_json(nullptr);
  ctx.summary["max_residual"] = o.max_residual;
  ctx.summary["bisections"] = o.bisections;
  ctx.summary["outside_proven_regime"] = params.outside_proven_regime();
  ctx.summary["message"] = o.message;
  if (o.solution) {
    ctx.summary["solution"] = glued_json(*o.solution);
    const Profile glued = o.solution->glued();
    {
      auto f = open_out(ctx.file("profile.csv"));
      write_profile_csv(f, glued, params);
    }
    if (shoot) {
      ShootingOptions so;
      so.nodes_per_side = c.analysis.solver.nodes_per_side;
      const ShootingResult sr = match_shooting(params, so);
      ordered_json sj = {{"converged", sr.status == ShootStatus::converged},
                         {"c0", sr.state.c0},
                         {"c1", sr.state.c1},
                         {"mismatch", sr.state.mismatch()},
                         {"message", sr.message}};
      if (sr.profile) {
        sj["sup_distance"] = sup_distance(glued, *sr.profile);
        auto f = open_out(ctx.file("shooting_profile.csv"));
        write_profile_csv(f, *sr.profile, params);
      }
      ctx.summary["shooting"] = sj;
    }
  }
  ctx.out << fmt::format("{} s_star={} max_residual={:.3e}\n", to_string(o.verdict),
                         o.solution ? fmt::format("{:.17g}", o.solution->s) : "-",
                         o.max_residual);
  switch (o.verdict) {
    case Verdict::solution_found:
      return kOk;
    case Verdict::no_sign_change:
      return kNoSignChange;
    case Verdict::inconclusive:
      break;
  }
  ctx.err << "solve: " << o.message << '\n';
  return kFailure;
}

int cmd_scan(Context& ctx) {
  const auto& c = ctx.cfg;
  const HopfParams params = HopfParams::make(c.p, c.q, c.lambda, c.mu);
  const ScanResult scan =
      scan_jump(params, c.analysis.s_min, c.analysis.s_max, c.analysis.scan_points, c.analysis);
  {
    auto f = open_out(ctx.file("scan.csv"));
    write_scan_csv(f, scan);
  }
  ordered_json brackets = ordered_json::array();
  for (const auto& b : scan.brackets) {
    brackets.push_back({{"s_lo", b.s_lo}, {"s_hi", b.s_hi}, {"l_lo", b.l_lo}, {"l_hi", b.l_hi}});
  }
  const bool sign_change = !scan.brackets.empty() || scan.s_star.has_value();
  ctx.summary["verdict"] = sign_change ? "sign_change" : "no_sign_change";
  ctx.summary["s_star"] = optional_json(scan.s_star);
  ctx.summary["brackets"] = brackets;
  ctx.summary["failures"] = scan.failures();
  ctx.out << fmt::format("{} rows, {} brackets, {} failures\n", scan.rows.size(),
                         scan.brackets.size(), scan.failures());
  if (scan.failures() == scan.rows.size()) return kFailure;
  return sign_change ? kOk : kNoSignChange;
}

int cmd_map(Context& ctx, const Range& lambda, const Range& mu) {
  const auto& c = ctx.cfg;
  const auto cells = solvability_map(c.p, c.q, lambda.min, lambda.max, mu.min, mu.max,
                                     lambda.count, mu.count, c.analysis);
  {
    auto f = open_out(ctx.file("map.csv"));
    write_map_csv(f, cells);
  }
  std::map<std::string, int> counts;
  for (const auto& cell : cells) ++counts[std::string(to_string(cell.verdict))];
  ctx.summary["lambda_range"] = {lambda.min, lambda.max, lambda.count};
  ctx.summary["mu_range"] = {mu.min, mu.max, mu.count};
  ctx.summary["verdict_counts"] = counts;
  ctx.out << fmt::format("{} cells written\n", cells.size());
  return kOk;
}

int cmd_blowup(Context& ctx, const std::vector<double>& s_values, double eps) {
  const auto& c = ctx.cfg;
  const HopfParams params = HopfParams::make(c.p, c.q, c.lambda, c.mu);
  std::vector<double> dist(s_values.size());
  std::vector<double> is1(s_values.size());
  parallel_for(s_values.size(), c.analysis.threads, [&](std::size_t i) {
    dist[i] = blowup_compare(s_values[i], params, eps, c.analysis.solver);
  });
  is1 = estimate_Is1_trend(params, s_values, c.analysis.solver, c.analysis.threads);
  {
    auto f = open_out(ctx.file("blowup.csv"));
    f << "s,sup_distance,Is1_over_s2\n";
    for (std::size_t i = 0; i < s_values.size(); ++i) {
      f << fmt::format("{:.17g},{:.17g},{:.17g}\n", s_values[i], dist[i], is1[i]);
    }
  }
  const BlowupConstant A = blowup_constant(params.lambda);
  ctx.summary["eps"] = eps;
  ctx.summary["blowup_constant"] = {{"value", A.divergent ? ordered_json(nullptr) : ordered_json(A.value)},
                                    {"divergent", A.divergent},
                                    {"outside_proven_regime", A.outside_proven_regime}};
  ctx.out << fmt::format("{:>12} {:>14} {:>14}\n", "s", "sup_distance", "Is1/s^2");
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    ctx.out << fmt::format("{:>12.6g} {:>14.6e} {:>14.6e}\n", s_values[i], dist[i], is1[i]);
  }
  return kOk;
}

// t where psi_{ds}(t) = target, from tan(psi/2) = (tan t / tan(ds))^{a/2}.
double psi_inverse(double target, double ds, double lambda) {
  const double a = 2.0 * std::sqrt(lambda);
  return std::atan(std::tan(ds) * std::pow(std::tan(0.5 * target), 2.0 / a));
}

int cmd_compare(Context& ctx, double s, double R, std::optional<double> d,
                std::optional<double> t0) {
  const auto& c = ctx.cfg;
  const HopfParams params = HopfParams::make(c.p, c.q, c.lambda, c.mu);
  if (!d) d = choose_d(s, R, params);
  if (!d) {
    ctx.err << "compare: no admissible d for this (s, R); pass --d\n";
    ctx.summary["message"] = "no admissible d";
    return kFailure;
  }
  const double threshold = std::max(theta_threshold(params), 0.75 * kPi);
  if (!t0) t0 = psi_inverse(threshold + 0.05, *d * s, params.lambda);
  const GluedSolution g = glue(s, params, c.analysis.solver);
  const ComparisonReport r = comparison_check(g, *d, *t0, params);
  ordered_json j = {{"s", s},
                    {"d", *d},
                    {"t0", *t0},
                    {"R", R},
                    {"hypothesis_met", r.hypothesis_met},
                    {"alpha_t0", r.alpha_t0},
                    {"psi_t0", r.psi_t0},
                    {"threshold", r.threshold},
                    {"min_margin", r.min_margin},
                    {"ordering_holds", r.ordering_holds},
                    {"min_supersolution", r.min_supersolution},
                    {"supersolution_positive", r.supersolution_positive},
                    {"nodes_checked", r.nodes_checked}};
  if (R * s < kHalfPi / 2.0) {
    const auto ja = junction_asymptotics_check(s, R, *d, params, c.analysis.solver);
    j["junction"] = {{"alpha_error", ja.alpha_error}, {"psi_error", ja.psi_error}};
    const auto e = estimate_Is2(params, s, R, *d, c.analysis.solver);
    j["Is2"] = {{"split", e.split},       {"A_s", e.A_s},         {"B_s", e.B_s},
                {"I_s1", e.I_s1},         {"I_s2", e.I_s2},       {"ratio", e.ratio},
                {"B_bound", e.B_bound},   {"A_bound", e.A_bound}, {"B_bound_holds", e.B_bound_holds}};
  }
  write_json(ctx.file("compare.json"), j);
  ctx.summary["comparison"] = j;
  const bool ok = r.hypothesis_met && r.ordering_holds && r.supersolution_positive;
  ctx.summary["verdict"] = ok ? "pass" : "fail";
  ctx.out << fmt::format("hypothesis={} min_margin={:.3e} min_supersolution={:.3e} -> {}\n",
                         r.hypothesis_met, r.min_margin, r.min_supersolution,
                         ok ? "pass" : "fail");
  return ok ? kOk : kFailure;
}

int cmd_verify(Context& ctx, bool json) {
  const auto rows = run_oracle_suite();
  ordered_json table = ordered_json::array();
  bool all = true;
  std::size_t width = 4;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  for (const auto& r : rows) {
    all = all && r.pass();
    table.push_back({{"name", r.name},
                     {"max_residual", r.max_residual},
                     {"tolerance", r.tolerance},
                     {"pass", r.pass()}});
  }
  if (json) {
    ctx.out << table.dump(2) << '\n';
  } else {
    ctx.out << fmt::format("{:<{}}  {:>12}  {:>9}  {}\n", "name", width, "max_residual",
                           "tolerance", "status");
    for (const auto& r : rows) {
      ctx.out << fmt::format("{:<{}}  {:>12.3e}  {:>9.1e}  {}\n", r.name, width, r.max_residual,
                             r.tolerance, r.pass() ? "pass" : "FAIL");
    }
  }
  write_json(ctx.file("verify.json"), table);
  ctx.summary["verdict"] = all ? "pass" : "fail";
  ctx.summary["oracles"] = rows.size();
  return all ? kOk : kFailure;
}

MulKind parse_kind(const std::string& s) {
  if (s == "complex") return MulKind::complex;
  if (s == "quaternion") return MulKind::quaternion;
  if (s == "octonion") return MulKind::octonion;
  throw std::invalid_argument(
      fmt::format("unknown multiplication '{}' (complex, quaternion, octonion)", s));
}

int cmd_hopf_eval(Context& ctx, const fs::path& profile_path, const std::string& kind,
                  int degree, std::size_t samples, std::uint64_t seed) {
  std::ifstream in(profile_path);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", profile_path.string()));
  const Profile profile = read_profile_csv(in);
  const BiEigenmap f(degree, parse_kind(kind));
  std::mt19937_64 rng(seed);
  const HopfSampleReport r = sample_alpha_hopf(profile, f, samples, rng);
  const ordered_json j = {{"kind", kind},
                          {"circle_degree", degree},
                          {"lambda", f.lambda()},
                          {"mu", f.mu()},
                          {"q", f.second_dimension()},
                          {"target_sphere", f.target_dimension()},
                          {"samples", r.samples},
                          {"seed", seed},
                          {"max_norm_error", r.max_norm_error},
                          {"north_error", r.north_error},
                          {"south_error", r.south_error}};
  ctx.out << j.dump(2) << '\n';
  ctx.summary["hopf_eval"] = j;
  const bool ok = r.max_norm_error <= 1e-10;
  ctx.summary["verdict"] = ok ? "pass" : "fail";
  return ok ? kOk : kFailure;
}

// ---------------------------------------------------------------------------

std::optional<std::string> flag_value(const std::vector<std::string>& args,
                                      const std::string& flag) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == flag && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind(flag + "=", 0) == 0) return args[i].substr(flag.size() + 1);
  }
  return std::nullopt;
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Config entries become flags placed right after the subcommand, unless the
// same flag is already on the command line.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  const auto path = flag_value(args, "--config");
  if (!path || args.empty()) return args;
  std::ifstream in(*path);
  if (!in) throw std::runtime_error(fmt::format("cannot read config {}", *path));
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config(in)) {
    const std::string flag = "--" + key;
    if (flag == "--config" || has_flag(args, flag)) continue;
    if (value == "true" || value == "false") {
      if (value == "true") injected.push_back(flag);
      continue;
    }
    injected.push_back(flag);
    injected.push_back(value);
  }
  std::vector<std::string> merged{args.front()};
  merged.insert(merged.end(), injected.begin(), injected.end());
  merged.insert(merged.end(), args.begin() + 1, args.end());
  return merged;
}

fs::path default_out_dir() {
  if (const char* env = std::getenv("HOPF_OUT_DIR"); env && *env) return env;
  return ".";
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Harmonic Hopf constructions between spheres: ODE solvers and checks", "hopf"};
  app.require_subcommand(1);

  RunConfig cfg;
  cfg.out_dir = default_out_dir();
  std::string config_path;

  auto common = [&](CLI::App* sub, bool scalar_params) {
    if (scalar_params) {
      sub->add_option("--lambda", cfg.lambda, "eigenvalue on the first sphere")
          ->capture_default_str();
      sub->add_option("--mu", cfg.mu, "eigenvalue on the second sphere")->capture_default_str();
    }
    sub->add_option("--p", cfg.p, "dimension of the first sphere")->capture_default_str();
    sub->add_option("--q", cfg.q, "dimension of the second sphere")->capture_default_str();
    sub->add_option("--nodes", cfg.analysis.solver.nodes_per_side, "grid nodes per side")
        ->capture_default_str();
    sub->add_option("--gradient-tol", cfg.analysis.solver.gradient_tol)->capture_default_str();
    sub->add_option("--step-tol", cfg.analysis.solver.step_tol)->capture_default_str();
    sub->add_option("--max-iterations", cfg.analysis.solver.max_iterations)
        ->capture_default_str();
    sub->add_option("--endpoint-gap", cfg.analysis.solver.endpoint_gap)->capture_default_str();
    sub->add_option("--root-tol", cfg.analysis.root_tol)->capture_default_str();
    sub->add_option("--residual-tol", cfg.analysis.residual_tol)->capture_default_str();
    sub->add_option("--residual-margin", cfg.analysis.residual_margin)->capture_default_str();
    sub->add_option("--boundary-tol", cfg.analysis.boundary_tol)->capture_default_str();
    sub->add_option("--s-min", cfg.analysis.s_min, "smallest junction")->capture_default_str();
    sub->add_option("--s-max", cfg.analysis.s_max, "largest junction")->capture_default_str();
    sub->add_option("--n", cfg.analysis.scan_points, "scan points")->capture_default_str();
    sub->add_option("-j,--threads", cfg.analysis.threads, "worker threads")
        ->capture_default_str();
    sub->add_option("--out", cfg.out_dir, "output directory (default $HOPF_OUT_DIR or .)");
    sub->add_option("--config", config_path, "key=value file; flags take precedence");
  };

  auto* solve = app.add_subcommand("solve", "find a solution by gluing and root finding");
  common(solve, true);
  bool shoot = false;
  solve->add_flag("--shoot", shoot, "cross-check with two-sided shooting");

  auto* scan = app.add_subcommand("scan-jump", "tabulate the jump l(s)");
  common(scan, true);

  auto* map = app.add_subcommand("map", "solvability verdicts over a (lambda, mu) grid");
  common(map, false);
  std::string lambda_range = "1:2:5";
  std::string mu_range = "1:6:10";
  map->add_option("--lambda", lambda_range, "min:max:count")->capture_default_str();
  map->add_option("--mu", mu_range, "min:max:count")->capture_default_str();

  auto* blowup = app.add_subcommand("blowup", "distance to the limit profile as s -> 0");
  common(blowup, true);
  std::vector<double> blowup_s{0.04, 0.02, 0.01};
  double eps = 0.1;
  blowup->add_option("--s", blowup_s, "junction values")->capture_default_str();
  blowup->add_option("--eps", eps, "compare on t/s in [eps, 1/eps]")->capture_default_str();

  auto* compare = app.add_subcommand("compare", "comparison lemma against psi_{ds}");
  common(compare, true);
  double cmp_s = 0.01;
  double cmp_R = 10.0;
  std::optional<double> cmp_d;
  std::optional<double> cmp_t0;
  compare->add_option("--s", cmp_s)->capture_default_str();
  compare->add_option("--R", cmp_R)->capture_default_str();
  compare->add_option("--d", cmp_d, "default: largest admissible d");
  compare->add_option("--t0", cmp_t0, "default: where psi_{ds} clears the threshold");

  auto* verify = app.add_subcommand("verify", "closed-form oracle table");
  bool verify_json = false;
  verify->add_flag("--json", verify_json, "print JSON instead of a table");
  verify->add_option("--out", cfg.out_dir, "output directory");

  auto* heval = app.add_subcommand("hopf-eval", "sample the Hopf construction of a profile");
  std::string profile_path;
  std::string kind = "complex";
  int degree = 1;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  heval->add_option("--profile", profile_path, "profile CSV")->required();
  heval->add_option("--kind", kind, "complex | quaternion | octonion")->capture_default_str();
  heval->add_option("--degree", degree, "circle degree")->capture_default_str();
  heval->add_option("--samples", samples)->capture_default_str();
  heval->add_option("--seed", seed)->capture_default_str();
  heval->add_option("--out", cfg.out_dir, "output directory");

  const std::string command = raw_args.empty() ? std::string{} : raw_args.front();
  Context ctx{command, cfg, out, err, ordered_json::object(), {}};

  auto finish = [&](int code, const std::string& message) -> int {
    ctx.cfg = cfg;
    ordered_json s = ordered_json::object();
    s["command"] = command;
    s["params"] = params_json(cfg);
    s["options"] = options_json(cfg);
    s["verdict"] = nullptr;
    s["s_star"] = nullptr;
    s["max_residual"] = nullptr;
    s.update(ctx.summary);
    if (!message.empty()) s["message"] = message;
    s["exit_code"] = code;
    ctx.files.push_back("summary.json");
    s["files_written"] = ctx.files;
    try {
      fs::create_directories(cfg.out_dir);
      write_json(cfg.out_dir / "summary.json", s);
    } catch (const std::exception& e) {
      err << "could not write summary.json: " << e.what() << '\n';
      return kFailure;
    }
    return code;
  };

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return finish(kFailure, fmt::format("usage error: {}", e.what()));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return finish(kFailure, fmt::format("usage error: {}", e.what()));
  }

  ctx.cfg = cfg;
  try {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    ctx.cfg = cfg;
    int code = kFailure;
    if (solve->parsed()) {
      code = cmd_solve(ctx, shoot);
    } else if (scan->parsed()) {
      code = cmd_scan(ctx);
    } else if (map->parsed()) {
      code = cmd_map(ctx, parse_range(lambda_range), parse_range(mu_range));
    } else if (blowup->parsed()) {
      code = cmd_blowup(ctx, blowup_s, eps);
    } else if (compare->parsed()) {
      code = cmd_compare(ctx, cmp_s, cmp_R, cmp_d, cmp_t0);
    } else if (verify->parsed()) {
      code = cmd_verify(ctx, verify_json);
    } else if (heval->parsed()) {
      code = cmd_hopf_eval(ctx, profile_path, kind, degree, samples, seed);
    }
    return finish(code, {});
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return finish(kFailure, fmt::format("usage error: {}", e.what()));
  } catch (const ConvergenceError& e) {
    err << "numerical failure: " << e.what() << '\n';
    ctx.summary["residual_norm"] = e.residual_norm();
    return finish(kFailure, fmt::format("numerical failure: {}", e.what()));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return finish(kFailure, fmt::format("error: {}", e.what()));
  }
}

}  // namespace hopf::cli
