#include "hopf/hopf_map.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "hopf/errors.hpp"

namespace hopf {

namespace {

std::vector<double> conj(std::span<const double> a) {
  std::vector<double> c(a.begin(), a.end());
  for (std::size_t i = 1; i < c.size(); ++i) c[i] = -c[i];
  return c;
}

// Cayley-Dickson doubling: (p, q)(r, s) = (p r - s* q, s p + q r*).
std::vector<double> cayley_dickson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (n == 1) return {a[0] * b[0]};
  const std::size_t h = n / 2;
  const auto p = a.first(h), q = a.subspan(h), r = b.first(h), s = b.subspan(h);
  const auto sc = conj(s);
  const auto rc = conj(r);
  const auto pr = cayley_dickson(p, r);
  const auto sq = cayley_dickson(sc, q);
  const auto sp = cayley_dickson(s, p);
  const auto qr = cayley_dickson(q, rc);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < h; ++i) {
    out[i] = pr[i] - sq[i];
    out[h + i] = sp[i] + qr[i];
  }
  return out;
}

std::vector<int> division_table(int dim) {
  std::vector<int> table(static_cast<std::size_t>(dim) * dim * dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      std::vector<double> ea(dim, 0.0), eb(dim, 0.0);
      ea[a] = 1.0;
      eb[b] = 1.0;
      const auto prod = cayley_dickson(ea, eb);
      for (int c = 0; c < dim; ++c) {
        table[(c * dim + a) * dim + b] = static_cast<int>(std::lround(prod[c]));
      }
    }
  }
  return table;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

// ---------------------------------------------------------------------------

OrthogonalMultiplication::OrthogonalMultiplication(MulKind kind, int k, int l, int n,
                                                   std::vector<int> table)
    : kind_(kind), k_(k), l_(l), n_(n), table_(std::move(table)) {}

OrthogonalMultiplication OrthogonalMultiplication::complex() {
  return {MulKind::complex, 2, 2, 2, division_table(2)};
}

OrthogonalMultiplication OrthogonalMultiplication::quaternion() {
  return {MulKind::quaternion, 4, 4, 4, division_table(4)};
}

OrthogonalMultiplication OrthogonalMultiplication::octonion() {
  return {MulKind::octonion, 8, 8, 8, division_table(8)};
}

OrthogonalMultiplication OrthogonalMultiplication::restricted(int n, int m) {
  if (m <= 0 || m % 2 != 0 || n < 1 || n > m) {
    throw std::invalid_argument(
        fmt::format("restricted multiplication needs even m >= n >= 1 (n = {}, m = {})", n, m));
  }
  std::vector<int> table(static_cast<std::size_t>(m) * 2 * n, 0);
  auto set = [&](int c, int a, int b, int v) { table[(c * 2 + a) * n + b] = v; };
  // (x1 + i x2)(y_{2j} + i y_{2j+1}) = (x1 y_{2j} - x2 y_{2j+1}) + i (x1 y_{2j+1} + x2 y_{2j})
  for (int j = 0; 2 * j < m; ++j) {
    const int re = 2 * j;
    const int im = 2 * j + 1;
    if (re < n) {
      set(re, 0, re, 1);
      set(im, 1, re, 1);
    }
    if (im < n) {
      set(re, 1, im, -1);
      set(im, 0, im, 1);
    }
  }
  return {MulKind::restricted, 2, n, m, std::move(table)};
}

std::vector<double> OrthogonalMultiplication::operator()(std::span<const double> x,
                                                         std::span<const double> y) const {
  if (static_cast<int>(x.size()) != k_ || static_cast<int>(y.size()) != l_) {
    throw std::invalid_argument(fmt::format("multiplication expects R^{} x R^{}, got R^{} x R^{}",
                                            k_, l_, x.size(), y.size()));
  }
  std::vector<double> out(n_, 0.0);
  for (int c = 0; c < n_; ++c) {
    double acc = 0.0;
    for (int a = 0; a < k_; ++a) {
      for (int b = 0; b < l_; ++b) {
        const int coef = coefficient(c, a, b);
        if (coef != 0) acc += coef * x[a] * y[b];
      }
    }
    out[c] = acc;
  }
  return out;
}

std::vector<double> orthmul_eval(const OrthogonalMultiplication& m, std::span<const double> x,
                                 std::span<const double> y) {
  return m(x, y);
}

std::vector<double> hopf_construction_eval(const OrthogonalMultiplication& m,
                                           std::span<const double> x,
                                           std::span<const double> y) {
  std::vector<double> out = m(x, y);
  for (double& v : out) v *= 2.0;
  double xx = 0.0;
  double yy = 0.0;
  for (double v : x) xx += v * v;
  for (double v : y) yy += v * v;
  out.push_back(xx - yy);
  return out;
}

// ---------------------------------------------------------------------------
// Polynomials

Polynomial Polynomial::variable(int index, int variables) {
  if (index < 0 || index >= variables) throw std::out_of_range("polynomial variable index");
  Polynomial p(variables);
  Exponents e(variables, 0);
  e[index] = 1;
  p.add_term(e, 1);
  return p;
}

Polynomial Polynomial::constant(std::int64_t c, int variables) {
  Polynomial p(variables);
  p.add_term(Exponents(variables, 0), c);
  return p;
}

void Polynomial::add_term(const Exponents& e, std::int64_t c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

int Polynomial::homogeneous_degree() const {
  int degree = -2;
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (int v : e) d += v;
    if (degree == -2) {
      degree = d;
    } else if (d != degree) {
      return -1;
    }
  }
  return degree == -2 ? 0 : degree;
}

Polynomial Polynomial::laplacian() const {
  Polynomial out(vars_);
  for (const auto& [e, c] : terms_) {
    for (int i = 0; i < vars_; ++i) {
      if (e[i] < 2) continue;
      Exponents d = e;
      d[i] -= 2;
      out.add_term(d, c * e[i] * (e[i] - 1));
    }
  }
  return out;
}

double Polynomial::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != vars_) throw std::invalid_argument("polynomial arity");
  double acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = static_cast<double>(c);
    for (int i = 0; i < vars_; ++i) {
      for (int p = 0; p < e[i]; ++p) m *= x[i];
    }
    acc += m;
  }
  return acc;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.vars_ != vars_) throw std::invalid_argument("polynomial arity");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.vars_ != vars_) throw std::invalid_argument("polynomial arity");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.vars_ != b.vars_) throw std::invalid_argument("polynomial arity");
  Polynomial out(a.vars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Polynomial::Exponents e(a.vars_);
      for (int i = 0; i < a.vars_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Polynomial operator*(std::int64_t c, Polynomial a) {
  Polynomial out(a.vars_);
  for (const auto& [e, v] : a.terms_) out.add_term(e, c * v);
  return out;
}

std::vector<Polynomial> hopf_construction_polynomials(const OrthogonalMultiplication& m) {
  const int k = m.k();
  const int l = m.l();
  const int vars = k + l;
  std::vector<Polynomial> out;
  for (int c = 0; c < m.n(); ++c) {
    Polynomial p(vars);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < l; ++b) {
        const int coef = m.coefficient(c, a, b);
        if (coef == 0) continue;
        p += (2 * coef) * (Polynomial::variable(a, vars) * Polynomial::variable(k + b, vars));
      }
    }
    out.push_back(std::move(p));
  }
  Polynomial last(vars);
  for (int a = 0; a < k; ++a) last += Polynomial::variable(a, vars) * Polynomial::variable(a, vars);
  for (int b = 0; b < l; ++b) {
    last -= Polynomial::variable(k + b, vars) * Polynomial::variable(k + b, vars);
  }
  out.push_back(std::move(last));
  return out;
}

EigenvalueReport eigenvalue_check(const OrthogonalMultiplication& m) {
  if (m.k() != m.l()) {
    throw std::invalid_argument("eigenvalue_check requires a multiplication R^k x R^k -> R^n");
  }
  EigenvalueReport r;
  r.degree = 2;
  r.ambient_dimension = m.k() + m.l();
  for (const auto& p : hopf_construction_polynomials(m)) {
    if (p.homogeneous_degree() != 2) throw std::logic_error("Hopf construction is not quadratic");
    // The Laplacian of a quadratic form is the (constant) trace of its Hessian.
    const Polynomial lap = p.laplacian();
    std::int64_t trace = 0;
    for (const auto& [e, c] : lap.terms()) trace += c;
    r.hessian_traces.push_back(trace);
    if (trace != 0) {
      throw std::logic_error(fmt::format("Hopf construction component has Hessian trace {}", trace));
    }
  }
  r.eigenvalue = r.degree * (r.degree + r.ambient_dimension - 2);
  return r;
}

std::pair<Polynomial, Polynomial> circle_eigenmap_polynomials(int degree) {
  if (degree < 1) throw std::invalid_argument("circle degree must be >= 1");
  Polynomial re = Polynomial::constant(1, 2);
  Polynomial im(2);
  const Polynomial x = Polynomial::variable(0, 2);
  const Polynomial y = Polynomial::variable(1, 2);
  for (int i = 0; i < degree; ++i) {
    // (re + i im)(x + i y)
    Polynomial nre = re * x - im * y;
    Polynomial nim = re * y + im * x;
    re = std::move(nre);
    im = std::move(nim);
  }
  return {re, im};
}

// ---------------------------------------------------------------------------

namespace {

OrthogonalMultiplication division_of(MulKind kind) {
  switch (kind) {
    case MulKind::complex:
      return OrthogonalMultiplication::complex();
    case MulKind::quaternion:
      return OrthogonalMultiplication::quaternion();
    case MulKind::octonion:
      return OrthogonalMultiplication::octonion();
    case MulKind::restricted:
      break;
  }
  throw std::invalid_argument("bi-eigenmap needs a division-algebra multiplication");
}

}  // namespace

BiEigenmap::BiEigenmap(int circle_degree, MulKind division_algebra)
    : degree_(circle_degree),
      psi_(division_of(division_algebra)),
      outer_(OrthogonalMultiplication::restricted(psi_.n() + 1, psi_.n() + 2)) {
  if (circle_degree < 1) throw std::invalid_argument("circle degree must be >= 1");
}

std::vector<double> BiEigenmap::phi(std::span<const double> x) const {
  if (x.size() != 2) throw std::invalid_argument("phi expects a point of R^2");
  double re = 1.0;
  double im = 0.0;
  for (int i = 0; i < degree_; ++i) {
    const double nre = re * x[0] - im * x[1];
    im = re * x[1] + im * x[0];
    re = nre;
  }
  return {re, im};
}

std::vector<double> BiEigenmap::psi(std::span<const double> y) const {
  const auto k = static_cast<std::size_t>(psi_.k());
  if (y.size() != 2 * k) {
    throw std::invalid_argument(fmt::format("psi expects a point of R^{}", 2 * k));
  }
  return hopf_construction_eval(psi_, y.first(k), y.subspan(k));
}

std::vector<double> BiEigenmap::operator()(std::span<const double> x,
                                           std::span<const double> y) const {
  return outer_(phi(x), psi(y));
}

std::vector<double> alpha_hopf_eval(const Profile& profile, const BiEigenmap& f, double t,
                                    std::span<const double> x, std::span<const double> y) {
  const double a = profile(t);
  std::vector<double> out = f(x, y);
  const double sa = std::sin(a);
  for (double& v : out) v *= sa;
  out.push_back(std::cos(a));
  return out;
}

std::vector<double> random_unit(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<double> v(dim);
  double n = 0.0;
  while (!(n > 1e-8)) {
    for (double& x : v) x = gauss(rng);
    n = norm(v);
  }
  for (double& x : v) x /= n;
  return v;
}

HopfSampleReport sample_alpha_hopf(const Profile& profile, const BiEigenmap& f,
                                   std::size_t samples, std::mt19937_64& rng) {
  HopfSampleReport r;
  r.samples = samples;
  std::uniform_real_distribution<double> ut(profile.grid().front(), profile.grid().back());
  const int q = f.second_dimension();
  for (std::size_t i = 0; i < samples; ++i) {
    const auto x = random_unit(2, rng);
    const auto y = random_unit(q, rng);
    const auto u = alpha_hopf_eval(profile, f, ut(rng), x, y);
    r.max_norm_error = std::max(r.max_norm_error, std::abs(1.0 - norm(u)));
  }
  const auto x = random_unit(2, rng);
  const auto y = random_unit(q, rng);
  auto pole_error = [&](double t, double sign) {
    auto u = alpha_hopf_eval(profile, f, t, x, y);
    u.back() -= sign;
    return norm(u);
  };
  r.north_error = pole_error(profile.grid().front(), 1.0);
  r.south_error = pole_error(profile.grid().back(), -1.0);
  return r;
}

}  // namespace hopf
