#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"

#include "hopf/errors.hpp"
#include "hopf/ode_core.hpp"

using namespace hopf;

namespace {

Profile sample(const Grid& g, auto&& fn) {
  std::vector<double> v;
  for (double t : g.nodes()) v.push_back(fn(t));
  return Profile(g, std::move(v));
}

// max |residual| on a uniform grid of n nodes inside [a, b]
double residual_on(int n, double a, double b, const HopfParams& hp, auto&& fn) {
  return max_abs(residual(sample(Grid::uniform(a, b, n), fn), hp));
}

}  // namespace

TEST_CASE("params validate and cache derived constants") {
  CHECK_THROWS_AS(HopfParams::make(0, 1, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(HopfParams::make(1, 2, 1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(HopfParams::make(1, 2, 0.0, 1.0), std::invalid_argument);

  const auto hp = HopfParams::make(1, 2, 2.25, 4.0);
  CHECK(hp.a == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(hp.r0 == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(hp.r1 == doctest::Approx((-1.0 + std::sqrt(17.0)) / 2.0).epsilon(1e-14));
  CHECK(HopfParams::make(1, 1, 0.5, 1).outside_proven_regime());
  CHECK(HopfParams::make(1, 2, 1, 4).in_theorem_regime());
  CHECK_FALSE(HopfParams::make(1, 2, 1, 1.5).in_theorem_regime());
}

TEST_CASE("indicial exponents") {
  CHECK(HopfParams::make(1, 1, 1, 1).r0 == doctest::Approx(1.0));
  CHECK(HopfParams::make(1, 1, 4, 1).r0 == doctest::Approx(2.0));
  CHECK(HopfParams::make(1, 2, 1, 4).r1 == doctest::Approx(1.561553).epsilon(1e-6));
  // property: r solves r^2 + (dim - 1) r = eigenvalue, and r0 = sqrt(lambda) when p = 1
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ev(0.1, 40.0);
  for (int i = 0; i < 50; ++i) {
    const int p = 1 + i % 5;
    const int q = 1 + (i / 5) % 4;
    const auto hp = HopfParams::make(p, q, ev(rng), ev(rng));
    CHECK(hp.r0 * hp.r0 + (p - 1) * hp.r0 - hp.lambda == doctest::Approx(0.0).scale(hp.lambda));
    CHECK(hp.r1 * hp.r1 + (q - 1) * hp.r1 - hp.mu == doctest::Approx(0.0).scale(hp.mu));
    CHECK(hp.r0 > 0.0);
    CHECK(hp.a == 2.0 * std::sqrt(hp.lambda));
    if (p == 1) CHECK(hp.r0 == doctest::Approx(hp.a / 2.0).epsilon(1e-14));
  }
}

TEST_CASE("coefficients") {
  const auto hp = HopfParams::make(1, 2, 1, 4);
  CHECK(coeff_Q(kPi / 4, hp) == doctest::Approx(10.0));
  CHECK(coeff_Q(kPi / 6, HopfParams::make(1, 1, 1, 1)) == doctest::Approx(16.0 / 3.0));
  CHECK(coeff_Q(1e-6, HopfParams::make(1, 1, 1, 1)) == doctest::Approx(1e12).epsilon(1e-6));
  CHECK_THROWS_AS(coeff_Q(0.0, hp), DomainError);
  CHECK_THROWS_AS(coeff_Q(kHalfPi, hp), DomainError);

  CHECK(weight_f(kPi / 4, hp) == doctest::Approx(std::sqrt(2.0) / 4.0));
  CHECK(weight_f(kPi / 3, HopfParams::make(1, 1, 1, 1)) == doctest::Approx(std::sqrt(3.0) / 4));
  CHECK(weight_f(0.0, hp) == 0.0);
  CHECK(std::abs(weight_f(kHalfPi, hp)) < 1e-30);

  // Q is symmetric under (t, lambda, mu) -> (pi/2 - t, mu, lambda)
  const auto m = hp.mirrored();
  CHECK(m.p == 2);
  CHECK(m.lambda == 4.0);
  for (double t = 0.05; t < kHalfPi; t += 0.1) {
    CHECK(coeff_Q(t, hp) == doctest::Approx(coeff_Q(kHalfPi - t, m)).epsilon(1e-13));
    CHECK(weight_f(t, hp) == doctest::Approx(weight_f(kHalfPi - t, m)).epsilon(1e-13));
    CHECK(drift(t, hp) == doctest::Approx(-drift(kHalfPi - t, m)).epsilon(1e-12));
  }
}

TEST_CASE("grids") {
  CHECK_THROWS(Grid({0.1, 0.1, 0.2}));
  const auto u = Grid::uniform(0.1, 0.5, 5);
  CHECK(u[2] == doctest::Approx(0.3));
  const auto g = Grid::graded(1e-3, 1.0, 101, 2.0);
  CHECK(g.front() == 1e-3);
  CHECK(g.back() == 1.0);
  const auto n = g.nodes();
  CHECK(std::adjacent_find(n.begin(), n.end(), std::greater_equal<>()) == n.end());
  CHECK(g[1] - g[0] < g[51] - g[50]);

  const std::vector<Cluster> cl{{0.0, 0.0, 0.25}, {0.5, 1e-3, 0.2}};
  const auto c = Grid::clustered(1e-6, 0.5, 400, 0.55, cl);
  CHECK(c.size() == 400);
  CHECK(c.front() == doctest::Approx(1e-6));
  CHECK(c.back() == doctest::Approx(0.5));
  const auto j = Grid::join(Grid::uniform(0.1, 0.5, 5), Grid::uniform(0.5, 1.0, 6));
  CHECK(j.size() == 10);
  REQUIRE(j.junction().has_value());
  CHECK(j[*j.junction()] == 0.5);
  CHECK_THROWS_AS(Grid::uniform(0.0, 1.0, 4).require_inside(kHalfPi), DomainError);
}

TEST_CASE("profile interpolation and derivatives") {
  const auto g = Grid::graded(0.1, 1.2, 200);
  const auto p = sample(g, [](double t) { return t * t; });
  CHECK(p(0.5) == doctest::Approx(0.25).epsilon(1e-3));
  CHECK_THROWS_AS(p(1.3), DomainError);
  const auto d = p.derivative();
  // three-point formulas are exact on quadratics, including one-sided ends
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(d[i] == doctest::Approx(2 * g[i]));
  CHECK(p.strictly_increasing());
  CHECK(p.within_closed_range());
}

TEST_CASE("finite-difference weights are exact on quadratics") {
  const double h0 = 0.3;
  const double h1 = 0.7;
  auto y = [](double t) { return 1.0 - 2.0 * t + 5.0 * t * t; };
  const double t1 = 1.0;
  CHECK(fd::first_central(h0, h1, y(t1 - h0), y(t1), y(t1 + h1)) ==
        doctest::Approx(-2.0 + 10.0 * t1));
  CHECK(fd::second_central(h0, h1, y(t1 - h0), y(t1), y(t1 + h1)) == doctest::Approx(10.0));
  CHECK(fd::first_backward(h1, h0, y(t1 - h0 - h1), y(t1 - h1), y(t1)) ==
        doctest::Approx(-2.0 + 10.0 * t1));
  CHECK(fd::first_forward(h0, h1, y(t1), y(t1 + h0), y(t1 + h0 + h1)) ==
        doctest::Approx(-2.0 + 10.0 * t1));
}

TEST_CASE("residual vanishes on exact solutions") {
  const auto hp = HopfParams::make(1, 1, 1, 1);
  const auto g = Grid::uniform(0.01, kHalfPi - 0.01, 500);
  // constants pi/2 and pi and 0: sin a cos a = 0, derivatives 0
  for (double c : {0.0, kHalfPi, kPi}) {
    CHECK(max_abs(residual(sample(g, [c](double) { return c; }), HopfParams::make(1, 2, 1, 4))) <
          1e-9);
  }
  CHECK(max_abs(flux_residual(sample(g, [](double) { return kHalfPi; }), hp)) < 1e-12);
  // 2t: substitution gives 4 cot 2t (1 - lambda) = 0
  CHECK(max_abs(residual(sample(g, [](double t) { return 2 * t; }), hp)) < 1e-9);
  // the conservative form is only second-order accurate on it
  auto flux_err = [&](int n) {
    const auto gn = Grid::uniform(0.01, kHalfPi - 0.01, n);
    return max_abs(flux_residual(sample(gn, [](double t) { return 2 * t; }), hp));
  };
  CHECK(std::log2(flux_err(250) / flux_err(500)) > 1.9);
}

TEST_CASE("residual converges at second order") {
  // a = 1 + sin t is no solution; its residual R(t) is written out by hand,
  // so the FD residual minus R must shrink like h^2.
  const auto hp = HopfParams::make(1, 2, 1, 4);
  auto a = [](double t) { return 1.0 + std::sin(t); };
  auto exact = [&](double t) {
    const double d1 = std::cos(t);
    const double d2 = -std::sin(t);
    const double q = 1.0 / (std::sin(t) * std::sin(t)) + 4.0 / (std::cos(t) * std::cos(t));
    return d2 + (1.0 / std::tan(t) - 2.0 * std::tan(t)) * d1 -
           q * std::sin(a(t)) * std::cos(a(t));
  };
  auto err = [&](int n) {
    const auto g = Grid::uniform(0.2, 1.3, n);
    const auto r = residual(sample(g, a), hp);
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) m = std::max(m, std::abs(r[i] - exact(g[i])));
    return m;
  };
  const double e1 = err(101);
  const double e2 = err(201);
  const double e3 = err(401);
  CHECK(std::log2(e1 / e2) > 1.9);
  CHECK(std::log2(e2 / e3) > 1.9);

  // flux form equals f times the plain form up to O(h^2)
  auto gap = [&](int n) {
    const auto g = Grid::uniform(0.2, 1.3, n);
    const auto p = sample(g, a);
    const auto r = residual(p, hp);
    const auto fr = flux_residual(p, hp);
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
      m = std::max(m, std::abs(fr[i] - weight_f(g[i], hp) * r[i]));
    }
    return m;
  };
  CHECK(gap(201) < gap(101) / 3.5);

  // a non-solution keeps an O(1) residual under refinement
  const double r1 = residual_on(101, 0.2, 1.3, hp, [](double t) { return t * t; });
  const double r2 = residual_on(201, 0.2, 1.3, hp, [](double t) { return t * t; });
  CHECK(r1 == doctest::Approx(r2).epsilon(0.05));
}

TEST_CASE("limit and rescaled residuals") {
  auto phi = [](double t, double s, double a) {
    return std::acos((std::pow(s, a) - std::pow(t, a)) / (std::pow(s, a) + std::pow(t, a)));
  };
  // geometric grid keeps the relative resolution uniform over [0.01, 100]
  auto geo_err = [&](int n, double s) {
    std::vector<double> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back(0.01 * std::pow(1e4, double(i) / (n - 1)));
    const Grid g(nodes);
    std::vector<double> r = limit_residual(sample(g, [&](double t) { return phi(t, s, 2.0); }), 1.0);
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) m = std::max(m, std::abs(r[i]) * g[i] * g[i]);
    return m;
  };
  CHECK(geo_err(400, 1.0) / geo_err(800, 1.0) > 3.6);
  CHECK(geo_err(800, 3.0) < 1e-3);
  CHECK(max_abs(limit_residual(sample(Grid::uniform(0.1, 5, 50), [](double) { return kHalfPi; }),
                               2.0)) < 1e-12);
  CHECK_THROWS_AS(limit_residual(sample(Grid::uniform(-1, 1, 5), [](double) { return 0.0; }), 1),
                  DomainError);

  // coefficient limits of the rescaled equation
  const double s = 1e-4;
  const double t = 1.0;
  CHECK(s * (1.0 / std::tan(s * t) - 2.0 * std::tan(s * t)) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s * s * coeff_Q(s * t, HopfParams::make(1, 2, 1, 4)) == doctest::Approx(1.0).epsilon(1e-6));

  // gamma(t) = a(st) for a = 2t, p = q = 1: rescaled residual ~ 0
  const auto hp = HopfParams::make(1, 1, 1, 1);
  const double sc = 0.5;
  const auto g = Grid::uniform(0.1, 2.9, 300);
  CHECK(max_abs(rescaled_residual(sample(g, [&](double x) { return 2 * sc * x; }), sc, hp)) < 1e-9);
  CHECK_THROWS_AS(rescaled_residual(sample(Grid::uniform(0.1, 4.0, 10), [](double) { return 1.0; }),
                                    sc, hp),
                  DomainError);
}

TEST_CASE("profile CSV round trip") {
  const auto hp = HopfParams::make(1, 1, 1, 1);
  const auto g = Grid::uniform(0.01, kHalfPi - 0.01, 50);
  const auto p = sample(g, [](double t) { return 2 * t; });
  std::stringstream ss;
  write_profile_csv(ss, p, hp);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "t,alpha,dalpha,residual");
  ss.seekg(0);
  const Profile back = read_profile_csv(ss);
  REQUIRE(back.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(back.grid()[i] == g[i]);
    CHECK(back.values()[i] == p.values()[i]);
  }
}
