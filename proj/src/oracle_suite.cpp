#include "hopf/oracle_suite.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "hopf/closed_forms.hpp"
#include "hopf/ode_core.hpp"

namespace hopf {

namespace {

constexpr std::size_t kNodes = 2000;
constexpr double kResidualTol = 1e-6;
constexpr double kIdentityTol = 1e-8;
constexpr double kConstantTol = 1e-8;

// Residuals are relative to the size of the singular coefficient so that
// rows near the endpoints are comparable with rows in the bulk.
OracleRow limit_row(double s, double lambda) {
  const Grid grid = Grid::graded(1e-3 * s, 1e3 * s, kNodes, 3.0);
  double worst = 0.0;
  for (double t : grid.nodes()) {
    const Jet j = phi_limit_jet(t, s, lambda);
    const double r = limit_operator(t, j.value, j.d1, j.d2, lambda);
    worst = std::max(worst, std::abs(r) * t * t / (1.0 + lambda));
  }
  return {fmt::format("phi_limit s={:.4g} lambda={:.4g}", s, lambda), worst, kResidualTol};
}

OracleRow psi_row(double s, double lambda) {
  const HopfParams params = comparison_params(lambda);
  const Grid grid = Grid::uniform(1e-3, kHalfPi - 1e-3, kNodes);
  double worst = 0.0;
  for (double t : grid.nodes()) {
    const Jet j = psi_comparison_jet(t, s, lambda);
    const double r = ode_operator(t, j.value, j.d1, j.d2, params);
    worst = std::max(worst, std::abs(r) / (1.0 + coeff_Q(t, params)));
  }
  return {fmt::format("psi_comparison s={:.4g} lambda={:.4g}", s, lambda), worst, kResidualTol};
}

OracleRow identity_2t_row() {
  const HopfParams params = HopfParams::make(1, 1, 1.0, 1.0);
  const Grid grid = Grid::uniform(1e-3, kHalfPi - 1e-3, kNodes);
  double worst = 0.0;
  for (double t : grid.nodes()) {
    const double r = ode_operator(t, identity_solution(t), 2.0, 0.0, params);
    worst = std::max(worst, std::abs(r) / (1.0 + coeff_Q(t, params)));
  }
  return {"identity_2t p=q=1 lambda=mu=1", worst, kResidualTol};
}

OracleRow derivative_identity_row(double s, double lambda) {
  double worst = 0.0;
  for (int i = 1; i < 40; ++i) {
    const double t = kHalfPi * i / 40.0;
    const auto d = psi_derivative_identity(t, s, lambda);
    worst = std::max(worst, std::abs(d.lhs - d.rhs) / (1.0 + std::abs(d.rhs)));
  }
  return {fmt::format("psi' identity s={:.4g} lambda={:.4g}", s, lambda), worst, kIdentityTol};
}

OracleRow sin2_row(double ds, double lambda) {
  double worst = 0.0;
  for (int i = 1; i < 200; ++i) {
    const double t = kHalfPi * i / 200.0;
    const double psi = psi_comparison(t, ds, lambda);
    const double sp = std::sin(psi);
    worst = std::max(worst, std::abs(sp * sp - sin2_psi_closed(t, ds, lambda)));
  }
  return {fmt::format("sin^2 psi closed form ds={:.4g} lambda={:.4g}", ds, lambda), worst,
          kIdentityTol};
}

OracleRow blowup_row(double lambda) {
  const auto a = blowup_constant(lambda);
  const double diff =
      a.divergent ? INFINITY : std::abs(a.value - blowup_constant_gamma(lambda));
  return {fmt::format("A(lambda) quadrature vs gamma lambda={}", lambda), diff, kConstantTol};
}

}  // namespace

std::vector<OracleRow> run_oracle_suite() {
  std::vector<OracleRow> rows;
  for (double lambda : {1.0, 2.0, 4.0}) {
    for (double s : {0.01, 0.5, 1.0, 3.0}) rows.push_back(limit_row(s, lambda));
  }
  for (double lambda : {1.0, 2.0, 4.0}) {
    for (double s : {0.1, kHalfPi / 2.0, 1.3}) rows.push_back(psi_row(s, lambda));
  }
  rows.push_back(identity_2t_row());
  for (double lambda : {1.0, 4.0}) {
    for (double s : {0.3, kHalfPi / 2.0}) rows.push_back(derivative_identity_row(s, lambda));
  }
  rows.push_back(sin2_row(0.05, 1.0));
  rows.push_back(sin2_row(0.4, 4.0));
  for (double lambda : {2.0, 4.0, 9.0}) rows.push_back(blowup_row(lambda));
  return rows;
}

}  // namespace hopf
