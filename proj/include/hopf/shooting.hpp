#pragma once

// Shooting from both singular endpoints with matching at an interior point.
//
// Near t = 0 the regular solutions behave like c0 t^r0, near pi/2 like
// pi - c1 (pi/2 - t)^r1; each amplitude fixes a unique trajectory.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hopf/ode_core.hpp"

namespace hopf {

struct ShootingOptions {
  double t_seed = 1e-4;  // distance of the first integration point from the endpoint
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double t_match = kHalfPi / 2.0;
  double mismatch_tol = 1e-8;
  std::size_t scan_points = 40;  // coarse log grid per amplitude
  double amp_min = 1e-3;
  double amp_max = 1e3;
  int max_seeds = 8;
  int max_iterations = 80;
  std::optional<std::pair<double, double>> seed;  // tried before the scan seeds
  std::size_t nodes_per_side = 2000;              // merged profile resolution
};

/// Trajectory of one shot. Integration stops early when a leaves [-pi, 2pi].
struct Shot {
  Profile profile;
  std::optional<double> blowup_time;
};

/// Leading term plus the t^{r+2} and t^{3r} corrections of the regular solution
/// c t^r at the endpoint t = 0; returns (a, a').
std::pair<double, double> series_seed(double c, double t, const HopfParams& params);

/// From t_seed to t_end, sampled at `output` (or at 400 log-spaced points when empty).
Shot integrate_from_zero(double c0, const HopfParams& params, double t_end,
                         const ShootingOptions& options = {},
                         std::span<const double> output = {});
/// From pi/2 - t_seed down to t_start; the returned profile is in increasing t.
Shot integrate_from_pi2(double c1, const HopfParams& params, double t_start,
                        const ShootingOptions& options = {},
                        std::span<const double> output = {});

enum class ShootStatus { converged, no_solution, failed };

struct ShootState {
  double c0 = 0.0;
  double c1 = 0.0;
  double t_match = kHalfPi / 2.0;
  double d_alpha = 0.0;   // left minus right at t_match
  double d_dalpha = 0.0;
  double mismatch() const;
};

struct ShootingResult {
  ShootStatus status = ShootStatus::failed;
  ShootState state;
  std::optional<Profile> profile;  // merged, with slopes, when converged
  int seeds_tried = 0;
  bool scan_sign_change = false;  // both mismatch components change sign in some scan cell
  bool family_pinned = false;     // degenerate one-parameter family, symmetric member chosen
  std::string message;
};

/// Coarse log-grid scan over (c0, c1), then Broyden iterations in log
/// coordinates from up to max_seeds seeds.
ShootingResult match_shooting(const HopfParams& params, const ShootingOptions& options = {});

/// Left and right states at t_match: (a, a').
std::pair<double, double> left_state(double c0, const HopfParams& params,
                                     const ShootingOptions& options = {});
std::pair<double, double> right_state(double c1, const HopfParams& params,
                                      const ShootingOptions& options = {});

/// CSV `c0,c1,dalpha,ddalpha` over the coarse scan grid.
void write_mismatch_map(std::ostream& out, const HopfParams& params,
                        const ShootingOptions& options = {});

}  // namespace hopf
