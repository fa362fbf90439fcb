#pragma once

// One-sided energy minimizers glued at a junction s.
//
// Interior: minimize J_s(a) = int_0^s (a'^2 + Q sin^2 a) f dt with a(s) = pi/2.
// Exterior: minimize J*_s over (s, pi/2) with the same pinned value.
// The glued curve solves the ODE away from s; its derivative jump
// l(s) = a'(s+0) - a'(s-0) vanishes exactly at genuine solutions.

#include <vector>

#include "hopf/ode_core.hpp"

namespace hopf {

enum class Side { interior, exterior };

struct FunctionalSpec {
  Side side;
  double s;
  Grid grid;
  HopfParams params;

  /// Interior grids end at s, exterior grids start at s; both stay inside (0, pi/2).
  void validate() const;
};

struct SolverOptions {
  std::size_t nodes_per_side = 2000;
  double endpoint_gap = 1e-6;     // outermost nodes sit at gap*s and pi/2 - gap*(pi/2 - s)
  double gradient_tol = 1e-10;    // max |dE/da_i| / stiffness_i, in radians
  double step_tol = 1e-11;        // max Newton correction at convergence, in radians
  int max_iterations = 200;
  double boundary_tol = 1e-3;     // attachment to 0 (interior) or pi (exterior)
};

/// Log-graded towards t = 0 and towards s, uniform in between.
Grid interior_grid(double s, const SolverOptions& options = {});
/// Log-graded towards s and towards t = pi/2, uniform in between.
Grid exterior_grid(double s, const SolverOptions& options = {});

/// Discrete functional: midpoint rule for the gradient term on each cell,
/// trapezoidal rule for the potential term. Throws DomainError when the
/// profile does not take the value pi/2 at s.
double eval_functional(const FunctionalSpec& spec, const Profile& profile);

struct Minimizer {
  Profile profile;
  double energy = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool attached = false;  // innermost value <= tol (interior), outermost >= pi - tol (exterior)
  bool monotone = false;  // nondecreasing node to node
  std::vector<double> energy_history;
};

/// Damped Newton on the discrete Euler-Lagrange system with an Armijo line
/// search on the energy; indefinite Hessians are shifted until the tridiagonal
/// factorisation succeeds. Throws ConvergenceError past max_iterations.
Minimizer minimize_interior(double s, const HopfParams& params, const Grid& grid,
                            const SolverOptions& options = {});
Minimizer minimize_exterior(double s, const HopfParams& params, const Grid& grid,
                            const SolverOptions& options = {});

struct JumpIntegrals {
  double I_s = 0.0;   // int (f^2 Q)' sin^2 a
  double I_s1 = 0.0;  // int sin t cos^{2q-1} t sin^2 a
  double I_s2 = 0.0;  // int sin^3 t cos^{2q-3} t sin^2 a
};

/// (f^2 Q)'(t) for general p, q.
double weight_flux_derivative(double t, const HopfParams& params);

/// Composite Simpson on each side of the junction, summed.
JumpIntegrals jump_integrals(const Profile& interior, const Profile& exterior,
                             const HopfParams& params);

struct GluedSolution {
  double s = 0.0;
  Profile beta;       // interior minimizer on (0, s]
  Profile beta_star;  // exterior minimizer on [s, pi/2)
  double l = 0.0;
  double l_tilde = 0.0;
  double d_minus = 0.0;
  double d_plus = 0.0;
  double J_interior = 0.0;
  double J_exterior = 0.0;
  double I_s = 0.0;
  double I_s1 = 0.0;
  double I_s2 = 0.0;
  bool interior_attached = false;
  bool exterior_attached = false;
  bool monotone = false;
  int iterations = 0;

  /// beta and beta_star on the joined grid, carrying the one-sided slopes.
  Profile glued() const;
};

GluedSolution glue(double s, const HopfParams& params, const SolverOptions& options = {});
GluedSolution glue(double s, const HopfParams& params, const Grid& interior,
                   const Grid& exterior, const SolverOptions& options = {});

/// l recomputed from the energy identity
///   f(s)^2 (a'(s+0)^2 - a'(s-0)^2) = I_s,
/// i.e. I_s / (f(s)^2 (d_plus + d_minus)). Throws DomainError when the slope sum vanishes.
double jump_via_integral(const GluedSolution& glued, const HopfParams& params);

}  // namespace hopf
