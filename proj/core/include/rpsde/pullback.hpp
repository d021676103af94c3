#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rpsde/csv.hpp"
#include "rpsde/integrate.hpp"

namespace rpsde {

/// Gaps below this absolute level are excluded from slope fits; deterministic
/// models reach exact floating-point fixed points.
inline constexpr double kGapFloor = 10.0 * 2.220446049250313e-16;

/// Convergence diagnostics of X(t, t* - n tau, omega, x) over n.
struct CauchyReport {
  /// depths[i] = n and gaps[i] = sup over the window of
  /// |X(., t* - n tau) - X(., t* - (n-1) tau)|, for n = 2 .. n_max.
  std::vector<int> depths;
  std::vector<double> gaps;
  /// Least-squares slope of log(gap) against n (per period); NaN when fewer
  /// than two gaps exceed kGapFloor.
  double slope_per_period = 0.0;
  std::size_t fitted_points = 0;
  /// Every gap is below kGapFloor: a deterministic fixed point was reached.
  bool trivially_convergent = false;
  bool pass = false;
};

/// Phase window [t*, t* + tau] of the pullback limit S(t, omega).
struct RandomPeriodicPath {
  GridSpec grid{1.0, 1};
  /// Grid index of t*; the window has steps_per_period + 1 nodes.
  std::int64_t k_star = 0;
  int dim = 1;
  std::vector<double> states;
  int n_used = 0;
  double last_gap = 0.0;
  double tol = 0.0;
  std::vector<double> gap_history;
  /// Initial point and scheme the pullback was started from.
  std::vector<double> x0;
  Scheme scheme = Scheme::euler;
  std::string path_id;
  std::string model_id;

  std::size_t nodes() const noexcept {
    return static_cast<std::size_t>(grid.steps_per_period() + 1);
  }
  std::span<const double> at(std::size_t node) const {
    return std::span<const double>(states).subspan(node * static_cast<std::size_t>(dim),
                                                   static_cast<std::size_t>(dim));
  }
};

struct PullbackSequence {
  /// windows[n - 1] is the window of depth n, n = 1 .. n_max.
  std::vector<Trajectory> windows;
  CauchyReport report;
};

/// Window [k*, k* + N] of the solution started at k* - depth N from x0.
Trajectory pullback_window(const SdeModel& model, const NoisePath& path, std::int64_t k_star,
                           int depth, std::span<const double> x0,
                           Scheme scheme = Scheme::euler);

/// Depths 1 .. n_max with sup-norm gaps and the fitted log-gap slope.
PullbackSequence pullback_sequence(const SdeModel& model, const NoisePath& path,
                                   std::int64_t k_star, std::span<const double> x0,
                                   int n_max, Scheme scheme = Scheme::euler);

/// Deepens the pullback until the sup gap is <= tol; throws
/// NonConvergenceError (with the gap history) if n_cap depths do not suffice.
RandomPeriodicPath random_periodic_path(const SdeModel& model, const NoisePath& path,
                                        std::int64_t k_star, std::span<const double> x0,
                                        double tol, int n_cap,
                                        Scheme scheme = Scheme::euler);

/// Rebuilds the window at a fixed depth (no convergence loop).
RandomPeriodicPath random_periodic_path_at_depth(const SdeModel& model,
                                                 const NoisePath& path,
                                                 std::int64_t k_star,
                                                 std::span<const double> x0, int depth,
                                                 Scheme scheme = Scheme::euler);

struct PeriodicityReport {
  /// sup over phase nodes t of |X(t + tau, t, omega, S(t)) - S'(t + tau)|,
  /// with S' rebuilt at t* + tau at the same depth.
  double flow_residual = 0.0;
  /// sup over phase nodes of |S_theta(t) - S'(t + tau)| where S_theta is
  /// rebuilt on theta_tau omega; zero by construction.
  double shift_residual = 0.0;
  double flow_tolerance = 0.0;
  bool flow_pass = false;
  bool shift_pass = false;
  bool pass = false;
};

/// Checks both identities of a random periodic solution on the grid. The
/// flow tolerance is 10 * S.tol; the shift residual must be exactly zero.
PeriodicityReport verify_random_periodicity(const SdeModel& model, const NoisePath& path,
                                            const RandomPeriodicPath& s);

/// Sup-norm distance at depth `depth` between the windows started from x0 and
/// x1 on the same path.
double initial_point_gap(const SdeModel& model, const NoisePath& path, std::int64_t k_star,
                         std::span<const double> x0, std::span<const double> x1, int depth,
                         Scheme scheme = Scheme::euler);

/// `phase_t,x1..xd` rows of the window.
CsvTable random_periodic_path_csv(const RandomPeriodicPath& s);
/// `n,gap` rows.
CsvTable cauchy_report_csv(const CauchyReport& report);

/// Slope fit shared by the pullback diagnostics.
CauchyReport summarize_gaps(std::vector<int> depths, std::vector<double> gaps);

}  // namespace rpsde
