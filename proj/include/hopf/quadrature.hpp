#pragma once

#include <span>

namespace hopf {

/// Composite Simpson rule on a nonuniform grid. An odd interval count is closed
/// with the quadratic through the last three nodes.
double simpson(std::span<const double> t, std::span<const double> y);

/// Composite trapezoidal rule.
double trapezoid(std::span<const double> t, std::span<const double> y);

}  // namespace hopf
