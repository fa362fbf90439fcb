#include "hopf/closed_forms.hpp"

#include <cmath>
#include <limits>

#include <boost/math/differentiation/autodiff.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include "hopf/errors.hpp"

namespace hopf {

namespace {

namespace ad = boost::math::differentiation;

// 2 arctan((t/s)^{a/2}) is the same angle as arccos((s^a - t^a)/(s^a + t^a)),
// without the cancellation near 0 and pi.
template <class T>
T phi_impl(const T& t, double s, double lambda) {
  using std::atan;
  using std::pow;
  const double half_a = std::sqrt(lambda);
  return 2.0 * atan(pow(t / s, half_a));
}

template <class T>
T psi_impl(const T& t, double s, double lambda) {
  using std::atan;
  using std::pow;
  using std::tan;
  const double half_a = std::sqrt(lambda);
  return 2.0 * atan(std::pow(1.0 / std::tan(s), half_a) * pow(tan(t), half_a));
}

template <class F>
Jet jet_of(F&& fn, double t) {
  const auto x = ad::make_fvar<double, 2>(t);
  const auto y = fn(x);
  return {y.derivative(0), y.derivative(1), y.derivative(2)};
}

void require_phi_args(double t, double s, double lambda) {
  if (!(t > 0.0) || !(s > 0.0) || !(lambda > 0.0)) {
    throw DomainError(fmt::format("phi_limit: need t, s, lambda > 0 (t={}, s={})", t, s));
  }
}

void require_psi_args(double t, double s, double lambda) {
  if (!(t > 0.0 && t < kHalfPi) || !(s > 0.0 && s < kHalfPi) || !(lambda > 0.0)) {
    throw DomainError(fmt::format("psi_comparison: need t, s in (0, pi/2) (t={}, s={})", t, s));
  }
}

}  // namespace

void ClosedFormKind::validate() const {
  switch (tag) {
    case ClosedFormTag::limit_phi:
      if (!(scale > 0.0)) throw DomainError("limit_phi scale must be > 0");
      break;
    case ClosedFormTag::comparison_psi:
      if (!(scale > 0.0 && scale < kHalfPi)) {
        throw DomainError("comparison_psi scale must lie in (0, pi/2)");
      }
      break;
    case ClosedFormTag::identity_2t:
      break;
  }
}

double phi_limit(double t, double s, double lambda) {
  require_phi_args(t, s, lambda);
  return phi_impl(t, s, lambda);
}

double psi_comparison(double t, double s, double lambda) {
  require_psi_args(t, s, lambda);
  return psi_impl(t, s, lambda);
}

Jet phi_limit_jet(double t, double s, double lambda) {
  require_phi_args(t, s, lambda);
  return jet_of([&](const auto& x) { return phi_impl(x, s, lambda); }, t);
}

Jet psi_comparison_jet(double t, double s, double lambda) {
  require_psi_args(t, s, lambda);
  return jet_of([&](const auto& x) { return psi_impl(x, s, lambda); }, t);
}

Jet evaluate_jet(const ClosedFormKind& kind, double t, double lambda) {
  kind.validate();
  switch (kind.tag) {
    case ClosedFormTag::limit_phi:
      return phi_limit_jet(t, kind.scale, lambda);
    case ClosedFormTag::comparison_psi:
      return psi_comparison_jet(t, kind.scale, lambda);
    case ClosedFormTag::identity_2t:
      break;
  }
  return {identity_solution(t), 2.0, 0.0};
}

DerivativeIdentity psi_derivative_identity(double t, double s, double lambda, double step) {
  require_psi_args(t, s, lambda);
  double h = step > 0.0 ? step : 1e-3 * std::min(t, kHalfPi - t);
  h = std::min(h, 0.5 * std::min(t, kHalfPi - t));
  auto central = [&](double hh) {
    return (psi_impl(t + hh, s, lambda) - psi_impl(t - hh, s, lambda)) / (2.0 * hh);
  };
  const double lhs = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  const double rhs = std::sqrt(lambda) * std::sin(psi_impl(t, s, lambda)) /
                     (std::sin(t) * std::cos(t));
  return {lhs, rhs};
}

HopfParams comparison_params(double lambda) { return HopfParams::make(1, 1, lambda, lambda); }

std::vector<double> comparison_residual(const Profile& profile, double lambda) {
  return residual(profile, comparison_params(lambda));
}

double theta_threshold(const HopfParams& params) {
  if (!(params.mu > params.lambda)) {
    throw DomainError("theta_threshold: requires mu > lambda");
  }
  const double ratio = params.lambda * (params.q - 1) / (params.mu - params.lambda);
  if (ratio > 1.0) {
    throw DomainError(fmt::format("theta_threshold: lambda(q-1)/(mu-lambda) = {} > 1", ratio));
  }
  return std::acos(-ratio);
}

double comparison_supersolution(double t, double psi, const HopfParams& params) {
  const double factor =
      (params.lambda - params.mu) * std::cos(psi) - params.lambda * (params.q - 1);
  return std::sin(t) * std::pow(std::cos(t), params.q - 2) * factor * std::sin(psi);
}

double sin2_psi_closed(double t, double ds, double lambda) {
  const double a = 2.0 * std::sqrt(lambda);
  const double ea = std::pow(std::tan(ds), a);
  const double ta = std::pow(std::tan(t), a);
  return 4.0 * ea * ta / ((ea + ta) * (ea + ta));
}

BlowupConstant blowup_constant(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("blowup_constant: lambda must be > 0");
  BlowupConstant out;
  out.outside_proven_regime = lambda < 1.0;
  if (lambda <= 1.0) {
    out.divergent = true;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  const double a = 2.0 * std::sqrt(lambda);
  const double c = 2.0 / a;
  // With u = t^a the integral is (4/a) int_0^inf u^c / (1+u)^2 du; the half
  // [1, inf) is folded onto (0, 1] by u -> 1/u, leaving an integrable
  // endpoint singularity v^{-c} that tanh-sinh refines adaptively.
  boost::math::quadrature::tanh_sinh<double> integrator(15);
  double err_head = 0.0;
  double err_tail = 0.0;
  const double head = integrator.integrate(
      [c](double u) { return std::pow(u, c) / ((1.0 + u) * (1.0 + u)); }, 0.0, 1.0, 1e-13,
      &err_head);
  const double tail = integrator.integrate(
      [c](double v) { return v > 0.0 ? std::pow(v, -c) / ((1.0 + v) * (1.0 + v)) : 0.0; },
      0.0, 1.0, 1e-13, &err_tail);
  out.value = 4.0 / a * (head + tail);
  out.error_estimate = 4.0 / a * (err_head + err_tail);
  return out;
}

double blowup_constant_gamma(double lambda) {
  if (!(lambda > 1.0)) return std::numeric_limits<double>::infinity();
  const double a = 2.0 * std::sqrt(lambda);
  const double c = 2.0 / a;
  return 4.0 / a * std::tgamma(1.0 + c) * std::tgamma(1.0 - c);
}

double identity_solution(double t) {
  if (!(t >= 0.0 && t <= kHalfPi)) {
    throw DomainError(fmt::format("identity_solution: t = {} outside [0, pi/2]", t));
  }
  return 2.0 * t;
}

}  // namespace hopf
