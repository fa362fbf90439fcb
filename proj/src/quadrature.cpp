#include "hopf/quadrature.hpp"

#include <stdexcept>

namespace hopf {

double simpson(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw std::invalid_argument("simpson: length mismatch");
  const std::size_t n = t.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * (t[1] - t[0]) * (y[0] + y[1]);
  double acc = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double h0 = t[i + 1] - t[i];
    const double h1 = t[i + 2] - t[i + 1];
    const double h = h0 + h1;
    acc += h / 6.0 *
           ((2.0 - h1 / h0) * y[i] + h * h / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
  }
  if (i + 1 < n) {
    // last interval [t[n-2], t[n-1]] from the parabola through t[n-3..n-1]
    const double h0 = t[n - 2] - t[n - 3];
    const double h1 = t[n - 1] - t[n - 2];
    acc += y[n - 1] * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1)) +
           y[n - 2] * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0) -
           y[n - 3] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
  }
  return acc;
}

double trapezoid(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw std::invalid_argument("trapezoid: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return acc;
}

}  // namespace hopf
