#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rpsde/csv.hpp"
#include "rpsde/integrate.hpp"
#include "rpsde/lyapunov.hpp"
#include "rpsde/parallel.hpp"
#include "rpsde/stats.hpp"

namespace rpsde {

/// Deterministic sampling design for the pathwise condition checks.
///
/// Times are the `n_times` nodes of one period. For d = 1 the points are a
/// uniform grid of `n_points` values on [-R, R]; for d > 1 they are keyed
/// uniform draws in the box. Pairs are all distinct point pairs plus the
/// near-diagonal pairs (x, x + near_diagonal * R * e_l), which probe the
/// one-sided Lipschitz quotient as y -> x.
struct SampleSpec {
  double box_radius = 5.0;
  int n_times = 64;
  int n_points = 101;
  double near_diagonal = 1e-7;
  std::uint64_t seed = 7;
};

/// Sampled point pairs of a design, flattened as [x_0 .. x_{d-1}, y_0 .. y_{d-1}].
std::vector<double> sample_pairs(const SampleSpec& spec, int dim);

/// L2 V(t, x - y) of the two-point motion: V_t + V_x (f0(x) - f0(y))
/// + 1/2 tr([sigma(x) - sigma(y)]^T H V [sigma(x) - sigma(y)]).
double two_point_generator(const SdeModel& model, const LyapunovSpec& lyap, double t,
                           std::span<const double> x, std::span<const double> y);

struct GeneratorBoundReport {
  /// max over samples of L2 V - lambda(t) V.
  double max_margin = 0.0;
  double worst_t = 0.0;
  std::vector<double> worst_x;
  std::vector<double> worst_y;
  std::size_t samples = 0;
  bool pass = false;
  /// Sampling caveat carried into every report.
  std::string note;
};

/// Falsification test of L2 V <= lambda V on the sampled box; pass iff the
/// largest margin is <= 1e-9. Needs `lyap.lambda_rate`.
GeneratorBoundReport check_generator_bound(const SdeModel& model, const LyapunovSpec& lyap,
                                           const SampleSpec& spec);

/// Sampled one-sided Lipschitz rate beta(t) and diffusion Lipschitz bound L(t)
/// over one period, with the trapezoid integral of beta.
struct ConditionReport {
  std::vector<double> times;
  std::vector<double> beta_profile;
  std::vector<double> lip_profile;
  double integral_beta = 0.0;
  bool pass = false;
  SampleSpec sampling;
  std::string note;
};

ConditionReport check_drift_conditions(const SdeModel& model, const SampleSpec& spec,
                                       const RunOptions& options = {});

/// lambda(t) = p beta(t) + p (p - 1) / 2 * m L(t)^2 interpolated (periodic,
/// piecewise linear) from a condition report.
std::function<double(double)> lambda_from_conditions(const ConditionReport& report,
                                                     double period, double p, int noise_dim);

struct ContractionReport {
  std::vector<double> times;
  std::vector<double> log_gaps;
  /// Least-squares slope of log|X^x - X^y| per unit time.
  double slope = 0.0;
  /// Empirical bound on alpha / p; equal to the slope.
  double implied_exponent = 0.0;
  /// The gap reached 0 and the series was cut at the previous boundary.
  bool truncated = false;
};

/// Log gaps of a shared-noise pair at period boundaries t0 + j tau,
/// j = 0 .. periods. x0 must differ from y0.
ContractionReport contraction_report(const SdeModel& model, const NoisePath& path,
                                     std::int64_t k0, int periods,
                                     std::span<const double> x0,
                                     std::span<const double> y0,
                                     Scheme scheme = Scheme::euler);

/// Finite-horizon surrogate for the temperedness condition: the mean over
/// `replicas` of max_{t0 < t <= t0 + horizon} ln V(t0, X(t, t0, ., x) - x).
Estimate tempered_running_max(const SdeModel& model, const GridSpec& grid,
                              std::uint64_t master_seed, std::size_t replicas,
                              std::int64_t k0, std::int64_t horizon_steps,
                              std::span<const double> x, const LyapunovSpec& lyap,
                              const RunOptions& options = {});

/// `t,beta,L` rows.
CsvTable condition_report_csv(const ConditionReport& report);
/// `t,log_gap` rows.
CsvTable contraction_report_csv(const ContractionReport& report);

}  // namespace rpsde
