#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rpsde/csv.hpp"
#include "rpsde/integrate.hpp"
#include "rpsde/parallel.hpp"
#include "rpsde/stats.hpp"

namespace rpsde {

/// Half-open interval [lo, hi); either end may be infinite. Complements of
/// an interval are unions of two such intervals, so counts add up exactly.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const noexcept { return lo <= x && x < hi; }
  static Interval whole() noexcept { return {}; }
};

/// Samples of S(s, .) at one phase s of the period.
struct EmpiricalMeasure {
  double phase = 0.0;
  std::int64_t phase_index = 0;
  int dim = 1;
  std::vector<double> samples;
  std::uint64_t master_seed = 0;
  std::uint64_t first_replica = 0;
  std::string model_id;

  std::size_t count() const noexcept { return samples.size() / static_cast<std::size_t>(dim); }
  std::span<const double> at(std::size_t i) const {
    return std::span<const double>(samples).subspan(i * static_cast<std::size_t>(dim),
                                                    static_cast<std::size_t>(dim));
  }
};

struct PullbackParams {
  /// Starting point of every pullback; empty means the origin.
  std::vector<double> x0;
  double tol = 1e-8;
  int n_cap = 200;
  Scheme scheme = Scheme::euler;
};

/// mu_s from N replicas: replica i uses noise seed replica_seed(master, first + i)
/// and contributes S(s, omega_i), the converged pullback started at phase s.
/// Any non-converging or diverging replica aborts the whole call.
EmpiricalMeasure sample_periodic_measure(const SdeModel& model, const GridSpec& grid,
                                         std::uint64_t master_seed, std::int64_t s_index,
                                         std::size_t n, const PullbackParams& params = {},
                                         const RunOptions& options = {},
                                         std::uint64_t first_replica = 0);

/// Several phases from one pullback per replica anchored at phase 0.
std::vector<EmpiricalMeasure> sample_periodic_measures(
    const SdeModel& model, const GridSpec& grid, std::uint64_t master_seed,
    std::span<const std::int64_t> phase_indices, std::size_t n,
    const PullbackParams& params = {}, const RunOptions& options = {});

/// Exact 1D W1 between equal-weight empiricals. Equal counts use the mean
/// absolute difference of sorted samples; unequal counts integrate the
/// difference of the two step quantile functions exactly.
double wasserstein1(std::span<const double> a, std::span<const double> b);
double wasserstein1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

enum class InvarianceMode { shifted_paths, independent };

std::string to_string(InvarianceMode mode);
InvarianceMode invariance_mode_from_string(const std::string& name);

struct InvarianceReport {
  InvarianceMode mode = InvarianceMode::shifted_paths;
  std::size_t n = 0;
  /// shifted_paths: largest |S(s + tau, omega_i) - S(s, theta_tau omega_i)|.
  double max_discrepancy = 0.0;
  std::size_t mismatched_replicas = 0;
  /// independent: W1 between the two estimates and its bootstrap SE.
  double w1 = 0.0;
  double bootstrap_se = 0.0;
  bool pass = false;
};

/// Checks mu_{s + tau} = mu_s. `bootstrap_draws` resamples of the pooled
/// sample give the null distribution of W1 in independent mode.
InvarianceReport check_period_invariance(const SdeModel& model, const GridSpec& grid,
                                         std::uint64_t master_seed, std::int64_t s_index,
                                         std::size_t n, InvarianceMode mode,
                                         const PullbackParams& params = {},
                                         const RunOptions& options = {},
                                         std::size_t bootstrap_draws = 200);

/// Central quantile interval holding `coverage` of the samples, closed at
/// both ends; the proxy used for Poincare sections.
struct SupportInterval {
  double lo = 0.0;
  double hi = 0.0;
};
SupportInterval support_interval(const EmpiricalMeasure& mu, double coverage = 0.999);

/// mu(A) with its binomial SE.
Estimate measure_probability(const EmpiricalMeasure& mu, const Interval& a);

/// `phase,sample_index,x1..xd`; several measures stack into one table.
CsvTable measure_csv(std::span<const EmpiricalMeasure> measures);
CsvTable invariance_report_csv(const InvarianceReport& report);

}  // namespace rpsde
