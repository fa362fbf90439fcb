#pragma once

// Exact solutions and constants used as oracles.

#include "hopf/ode_core.hpp"

namespace hopf {

enum class ClosedFormTag { limit_phi, comparison_psi, identity_2t };

struct ClosedFormKind {
  ClosedFormTag tag;
  double scale = 1.0;  // s; unused for identity_2t

  /// Throws DomainError unless s > 0 (limit_phi) or s in (0, pi/2) (comparison_psi).
  void validate() const;
};

/// Value and first two derivatives at a point.
struct Jet {
  double value;
  double d1;
  double d2;
};

/// phi_s(t) = arccos((s^a - t^a)/(s^a + t^a)), a = 2 sqrt(lambda); solves the
/// limit equation on (0, inf) with phi(0+) = 0, phi(inf) = pi, phi_s(s) = pi/2.
double phi_limit(double t, double s, double lambda);

/// psi_s(t) = 2 arctan(cot^{a/2}(s) tan^{a/2}(t)) on (0, pi/2).
///
/// The printed comparison equation carries the drift cot t alone; psi_s
/// actually solves it with drift cot t - tan t, i.e. the Hopf ODE with
/// p = q = 1 and mu = lambda (see comparison_residual).
double psi_comparison(double t, double s, double lambda);

/// Exact derivatives through second order (forward-mode autodiff).
Jet phi_limit_jet(double t, double s, double lambda);
Jet psi_comparison_jet(double t, double s, double lambda);
Jet evaluate_jet(const ClosedFormKind& kind, double t, double lambda);

struct DerivativeIdentity {
  double lhs;  // finite-difference derivative of psi_s
  double rhs;  // sqrt(lambda) sin psi / (sin t cos t)
};

/// lhs uses a Richardson-extrapolated central difference with the given step
/// (default: 1e-3 times the distance to the nearer endpoint).
DerivativeIdentity psi_derivative_identity(double t, double s, double lambda,
                                           double step = 0.0);

/// Parameters of the operator psi_s solves: p = q = 1, mu = lambda.
HopfParams comparison_params(double lambda);

/// FD residual of a profile under the comparison operator
/// psi'' + (cot t - tan t) psi' - lambda sin psi cos psi / (sin^2 t cos^2 t).
std::vector<double> comparison_residual(const Profile& profile, double lambda);

/// theta = arccos(-lambda (q-1) / (mu - lambda)). Throws DomainError if
/// mu <= lambda or the ratio exceeds 1.
double theta_threshold(const HopfParams& params);

/// (f psi')' - f Q sin psi cos psi for psi = psi_s and p = 1, in closed form:
/// sin t cos^{q-2} t ((lambda - mu) cos psi - lambda (q-1)) sin psi.
double comparison_supersolution(double t, double psi, const HopfParams& params);

/// sin^2 psi_{ds}(t) = 4 e^a tan^a t / (e^a + tan^a t)^2 with e = tan(ds).
double sin2_psi_closed(double t, double ds, double lambda);

struct BlowupConstant {
  double value = 0.0;  // meaningful only when !divergent
  double error_estimate = 0.0;
  bool divergent = false;
  bool outside_proven_regime = false;  // lambda < 1
};

/// A(lambda) = int_0^inf 4 t^{a+1} / (1 + t^a)^2 dt by adaptive Gauss-Kronrod
/// quadrature; [1, inf) is mapped through u = t^{-a}. Divergent for lambda <= 1.
BlowupConstant blowup_constant(double lambda);

/// The same constant through the gamma function: (4/a) Gamma(1+c) Gamma(1-c), c = 2/a.
double blowup_constant_gamma(double lambda);

/// alpha(t) = 2t, the exact solution for p = q = 1, lambda = mu = 1.
double identity_solution(double t);

}  // namespace hopf
