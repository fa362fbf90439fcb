#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "hopf/errors.hpp"
#include "hopf/hopf_map.hpp"

using namespace hopf;

namespace {

double norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

std::vector<OrthogonalMultiplication> all_kinds() {
  return {OrthogonalMultiplication::complex(),      OrthogonalMultiplication::quaternion(),
          OrthogonalMultiplication::octonion(),     OrthogonalMultiplication::restricted(3, 4),
          OrthogonalMultiplication::restricted(5, 6), OrthogonalMultiplication::restricted(9, 10)};
}

std::vector<double> basis(int dim, int i) {
  std::vector<double> e(dim, 0.0);
  e[i] = 1.0;
  return e;
}

std::vector<double> gaussian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  std::vector<double> v(dim);
  for (double& x : v) x = n(rng);
  return v;
}

}  // namespace

TEST_CASE("norm is multiplicative") {
  std::mt19937_64 rng(42);
  for (const auto& m : all_kinds()) {
    CAPTURE(m.n());
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto x = gaussian(m.k(), rng);
      const auto y = gaussian(m.l(), rng);
      const auto z = m(x, y);
      REQUIRE(z.size() == static_cast<std::size_t>(m.n()));
      worst = std::max(worst, std::abs(norm(z) - norm(x) * norm(y)) / (norm(x) * norm(y)));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("bilinearity") {
  std::mt19937_64 rng(7);
  for (const auto& m : all_kinds()) {
    const auto x1 = gaussian(m.k(), rng);
    const auto x2 = gaussian(m.k(), rng);
    const auto y = gaussian(m.l(), rng);
    std::vector<double> xs(m.k());
    for (int i = 0; i < m.k(); ++i) xs[i] = 2.0 * x1[i] - 3.0 * x2[i];
    const auto a = m(x1, y);
    const auto b = m(x2, y);
    const auto c = m(xs, y);
    for (int i = 0; i < m.n(); ++i) CHECK(c[i] == doctest::Approx(2.0 * a[i] - 3.0 * b[i]));
    CHECK(orthmul_eval(m, x1, y) == a);
  }
  const auto cx = OrthogonalMultiplication::complex();
  CHECK_THROWS_AS(cx(std::vector<double>{1.0}, std::vector<double>{1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS(OrthogonalMultiplication::restricted(5, 4));
  CHECK_THROWS(OrthogonalMultiplication::restricted(3, 5));
}

TEST_CASE("division algebra tables") {
  const auto c = OrthogonalMultiplication::complex();
  CHECK(c(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == std::vector<double>{0, 1});
  CHECK(c(std::vector<double>{0, 1}, std::vector<double>{0, 1}) == std::vector<double>{-1, 0});

  const auto h = OrthogonalMultiplication::quaternion();
  // i j = k, j i = -k
  CHECK(h(basis(4, 1), basis(4, 2)) == std::vector<double>{0, 0, 0, 1});
  CHECK(h(basis(4, 2), basis(4, 1)) == std::vector<double>{0, 0, 0, -1});

  const auto o = OrthogonalMultiplication::octonion();
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      const auto z = o(basis(8, a), basis(8, b));
      int nonzero = 0;
      for (double v : z) {
        if (v != 0.0) {
          ++nonzero;
          CHECK(std::abs(v) == 1.0);
        }
      }
      CHECK(nonzero == 1);
      if (a == 0) CHECK(z == basis(8, b));
      if (a != 0 && a == b) CHECK(z[0] == -1.0);
    }
  }
  // octonions are alternative but not associative
  std::mt19937_64 rng(3);
  const auto x = gaussian(8, rng);
  const auto y = gaussian(8, rng);
  const auto xx_y = o(o(x, x), y);
  const auto x_xy = o(x, o(x, y));
  for (int i = 0; i < 8; ++i) CHECK(xx_y[i] == doctest::Approx(x_xy[i]));
  const auto e1 = basis(8, 1), e2 = basis(8, 2), e4 = basis(8, 4);
  CHECK(o(o(e1, e2), e4) != o(e1, o(e2, e4)));
}

TEST_CASE("Hopf construction") {
  std::mt19937_64 rng(9);
  for (const auto& m : all_kinds()) {
    const auto x = random_unit(m.k(), rng);
    const auto y = random_unit(m.l(), rng);
    std::vector<double> xs(x), ys(y);
    const double t = 0.37;
    for (double& v : xs) v *= std::sin(t);
    for (double& v : ys) v *= std::cos(t);
    const auto F = hopf_construction_eval(m, xs, ys);
    CHECK(F.size() == static_cast<std::size_t>(m.n() + 1));
    CHECK(norm(F) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(F.back() == doctest::Approx(-std::cos(2 * t)));
  }
}

TEST_CASE("Hopf constructions are harmonic polynomial maps") {
  const int expected[] = {8, 16, 32};
  int i = 0;
  for (const auto& m : {OrthogonalMultiplication::complex(), OrthogonalMultiplication::quaternion(),
                        OrthogonalMultiplication::octonion()}) {
    const EigenvalueReport r = eigenvalue_check(m);
    for (auto tr : r.hessian_traces) CHECK(tr == 0);
    CHECK(r.degree == 2);
    CHECK(r.ambient_dimension == 2 * m.k());
    CHECK(r.eigenvalue == expected[i++]);
    for (const auto& p : hopf_construction_polynomials(m)) {
      CHECK(p.homogeneous_degree() == 2);
      CHECK(p.laplacian().is_zero());
    }
  }
  // restricted multiplication has k != l
  CHECK_THROWS(eigenvalue_check(OrthogonalMultiplication::restricted(3, 4)));
}

TEST_CASE("circle eigenmaps") {
  for (int d = 1; d <= 5; ++d) {
    const auto [re, im] = circle_eigenmap_polynomials(d);
    CHECK(re.laplacian().is_zero());
    CHECK(im.laplacian().is_zero());
    CHECK(re.homogeneous_degree() == d);
    // restricted to S^1 the eigenvalue is d(d + 2 - 2) = d^2
    const double th = 0.3;
    const std::vector<double> x{std::cos(th), std::sin(th)};
    CHECK(re(x) == doctest::Approx(std::cos(d * th)));
    CHECK(im(x) == doctest::Approx(std::sin(d * th)));
  }
}

TEST_CASE("polynomial arithmetic") {
  const auto x = Polynomial::variable(0, 2);
  const auto y = Polynomial::variable(1, 2);
  const auto p = x * x - y * y;
  CHECK(p.laplacian().is_zero());
  const auto q = x * x + y * y;
  CHECK(q.laplacian().terms().size() == 1);
  CHECK(q.laplacian()(std::vector<double>{0.0, 0.0}) == 4.0);
  CHECK((x + Polynomial::constant(1, 2)).homogeneous_degree() == -1);
  CHECK((3 * x)(std::vector<double>{2.0, 0.0}) == 6.0);
  CHECK((p - p).is_zero());
}

TEST_CASE("bi-eigenmaps") {
  std::mt19937_64 rng(17);
  for (auto kind : {MulKind::complex, MulKind::quaternion, MulKind::octonion}) {
    for (int d : {1, 2, 3}) {
      const BiEigenmap f(d, kind);
      CHECK(f.lambda() == d * d);
      CHECK(f.mu() == 2.0 * f.second_dimension());
      for (int i = 0; i < 100; ++i) {
        const auto x = random_unit(2, rng);
        const auto y = random_unit(f.second_dimension(), rng);
        CHECK(norm(f(x, y)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(norm(f.phi(x)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(norm(f.psi(y)) == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
  CHECK(BiEigenmap(1, MulKind::complex).second_dimension() == 4);
  CHECK(BiEigenmap(1, MulKind::octonion).second_dimension() == 16);
  CHECK(BiEigenmap(1, MulKind::octonion).target_dimension() == 10);
  CHECK_THROWS(BiEigenmap(0, MulKind::complex));
  CHECK_THROWS(BiEigenmap(1, MulKind::restricted));
}

TEST_CASE("alpha-Hopf construction lands on the sphere") {
  const Grid g = Grid::uniform(1e-3, kHalfPi - 1e-3, 400);
  std::vector<double> v;
  for (double t : g.nodes()) v.push_back(2 * t);
  const Profile prof(g, v);
  const BiEigenmap f(1, MulKind::complex);
  std::mt19937_64 rng(1);
  const HopfSampleReport r = sample_alpha_hopf(prof, f, 10000, rng);
  CHECK(r.samples == 10000);
  CHECK(r.max_norm_error <= 1e-10);
  CHECK(r.north_error <= 3e-3);
  CHECK(r.south_error <= 3e-3);

  const auto x = random_unit(2, rng);
  const auto y = random_unit(4, rng);
  const auto u = alpha_hopf_eval(prof, f, kPi / 4, x, y);
  CHECK(u.back() == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(alpha_hopf_eval(prof, f, 1e-4, x, y), DomainError);
}

TEST_CASE("random_unit") {
  std::mt19937_64 rng(5);
  std::vector<double> mean(5, 0.0);
  for (int i = 0; i < 20000; ++i) {
    const auto v = random_unit(5, rng);
    CHECK(norm(v) == doctest::Approx(1.0));
    for (int j = 0; j < 5; ++j) mean[j] += v[j] / 20000;
  }
  for (double m : mean) CHECK(std::abs(m) < 0.02);
}
