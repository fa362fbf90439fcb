#pragma once

// Closed-form oracle table behind `hopf verify`.

#include <string>
#include <vector>

namespace hopf {

struct OracleRow {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_residual <= tolerance; }
};

/// Every row is independent of the solvers: residuals use exact derivative
/// jets on 2000-node grids, constants are compared against the gamma form.
std::vector<OracleRow> run_oracle_suite();

}  // namespace hopf
