#pragma once

// Orthogonal multiplications, their Hopf constructions, bi-eigenmaps and the
// map u(sin t x, cos t y) = (sin a(t) f(x, y), cos a(t)).

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "hopf/ode_core.hpp"

namespace hopf {

enum class MulKind { complex, quaternion, octonion, restricted };

/// Bilinear f: R^k x R^l -> R^n with integer structure constants,
/// f(x, y)_c = sum_{a,b} C[c][a][b] x_a y_b.
class OrthogonalMultiplication {
 public:
  static OrthogonalMultiplication complex();
  static OrthogonalMultiplication quaternion();
  static OrthogonalMultiplication octonion();
  /// R^2 x R^n -> R^m (m even, n <= m): y is packed into C^{m/2} as
  /// (y1 + i y2, y3 + i y4, ...) and multiplied by the complex scalar x1 + i x2.
  static OrthogonalMultiplication restricted(int n, int m);

  MulKind kind() const { return kind_; }
  int k() const { return k_; }
  int l() const { return l_; }
  int n() const { return n_; }
  int coefficient(int c, int a, int b) const { return table_[(c * k_ + a) * l_ + b]; }

  /// Throws std::invalid_argument on a dimension mismatch.
  std::vector<double> operator()(std::span<const double> x, std::span<const double> y) const;

 private:
  OrthogonalMultiplication(MulKind kind, int k, int l, int n, std::vector<int> table);

  MulKind kind_;
  int k_, l_, n_;
  std::vector<int> table_;
};

/// Same as m(x, y).
std::vector<double> orthmul_eval(const OrthogonalMultiplication& m, std::span<const double> x,
                                 std::span<const double> y);

/// F_f(x, y) = (2 f(x, y), |x|^2 - |y|^2).
std::vector<double> hopf_construction_eval(const OrthogonalMultiplication& m,
                                           std::span<const double> x,
                                           std::span<const double> y);

/// Polynomial with integer coefficients in a fixed number of variables.
class Polynomial {
 public:
  using Exponents = std::vector<int>;

  explicit Polynomial(int variables) : vars_(variables) {}
  static Polynomial variable(int index, int variables);
  static Polynomial constant(std::int64_t c, int variables);

  int variables() const { return vars_; }
  const std::map<Exponents, std::int64_t>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Degree if every term has the same total degree, otherwise -1 (0 for zero).
  int homogeneous_degree() const;

  Polynomial laplacian() const;
  double operator()(std::span<const double> x) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(std::int64_t c, Polynomial a);

 private:
  void add_term(const Exponents& e, std::int64_t c);

  int vars_;
  std::map<Exponents, std::int64_t> terms_;
};

/// Components of F_f as polynomials in (x_1..x_k, y_1..y_l).
std::vector<Polynomial> hopf_construction_polynomials(const OrthogonalMultiplication& m);

struct EigenvalueReport {
  std::vector<std::int64_t> hessian_traces;  // one per component; all zero for harmonic maps
  int degree = 0;
  int ambient_dimension = 0;
  int eigenvalue = 0;  // degree (degree + dimension - 2)
};

/// Exact harmonicity check of the Hopf construction (requires k = l).
/// Throws std::logic_error when a trace is nonzero.
EigenvalueReport eigenvalue_check(const OrthogonalMultiplication& m);

/// Re and Im of (x_1 + i x_2)^d.
std::pair<Polynomial, Polynomial> circle_eigenmap_polynomials(int degree);

/// f(x, y) = g(phi(x), psi(y)) on S^1 x S^{q-1}, with phi(x) = (x_1 + i x_2)^d
/// (eigenvalue d^2), psi the Hopf construction of a division-algebra
/// multiplication (eigenvalue 2q) and g a restricted multiplication.
class BiEigenmap {
 public:
  BiEigenmap(int circle_degree, MulKind division_algebra);

  int circle_degree() const { return degree_; }
  double lambda() const { return static_cast<double>(degree_) * degree_; }
  double mu() const { return 2.0 * second_dimension(); }
  int second_dimension() const { return 2 * psi_.k(); }  // q
  int target_dimension() const { return outer_.n(); }    // f lands in S^{n-1}

  std::vector<double> phi(std::span<const double> x) const;
  std::vector<double> psi(std::span<const double> y) const;
  std::vector<double> operator()(std::span<const double> x, std::span<const double> y) const;

  const OrthogonalMultiplication& outer() const { return outer_; }
  const OrthogonalMultiplication& division() const { return psi_; }

 private:
  int degree_;
  OrthogonalMultiplication psi_;
  OrthogonalMultiplication outer_;
};

/// (sin a(t) f(x, y), cos a(t)) with a interpolated from the profile.
/// Throws DomainError when t is outside the profile grid.
std::vector<double> alpha_hopf_eval(const Profile& profile, const BiEigenmap& f, double t,
                                    std::span<const double> x, std::span<const double> y);

struct HopfSampleReport {
  std::size_t samples = 0;
  double max_norm_error = 0.0;  // max |1 - |u||
  double north_error = 0.0;     // |u - (0, .., 0, 1)| at the first profile node
  double south_error = 0.0;     // |u - (0, .., 0, -1)| at the last profile node
};

/// Uniform random t in the profile range and random unit x, y.
HopfSampleReport sample_alpha_hopf(const Profile& profile, const BiEigenmap& f,
                                   std::size_t samples, std::mt19937_64& rng);

/// Uniform point on the unit sphere of R^dim.
std::vector<double> random_unit(int dim, std::mt19937_64& rng);

}  // namespace hopf
