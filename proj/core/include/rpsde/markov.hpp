#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpsde/csv.hpp"
#include "rpsde/integrate.hpp"
#include "rpsde/lyapunov.hpp"
#include "rpsde/measures.hpp"
#include "rpsde/parallel.hpp"
#include "rpsde/stats.hpp"

namespace rpsde {

/// Scalar observable with a known bound on |h|; `sup_norm` is infinite for
/// unbounded functions.
struct TestFunction {
  std::string name;
  std::function<double(double)> fn;
  double sup_norm = 0.0;

  double operator()(double x) const { return fn(x); }
};

/// Named observables: identity, square, one, tanh, clamp(lo, hi),
/// indicator(lo, hi) on [lo, hi), and mollified_indicator(lo, hi, width),
/// a continuous ramp of the given width at each end.
TestFunction make_test_function(const std::string& name, std::span<const double> params = {});

/// Sample mean of h over a measure.
Estimate expectation(const EmpiricalMeasure& mu, const TestFunction& h);

struct ProbabilityEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t hits = 0;
  std::size_t n = 0;
};

/// Fraction of N replicas with X(s + horizon, s, omega_i, x) in A.
ProbabilityEstimate transition_probability(const SdeModel& model, const GridSpec& grid,
                                           std::uint64_t master_seed, std::int64_t s_index,
                                           double x, std::int64_t horizon_steps,
                                           const Interval& a, std::size_t n,
                                           const RunOptions& options = {});

struct KbReport {
  /// P(s, x; t + n tau, A) estimates for n = 1 .. N_periods.
  std::vector<std::size_t> hits;
  std::vector<double> per_n;
  std::vector<double> per_n_se;
  std::size_t replicas = 0;
  double average = 0.0;
  /// SE of the average from the per-replica means.
  double se = 0.0;
  std::optional<Estimate> reference;
  double difference = 0.0;
  double combined_se = 0.0;
  bool pass = false;
};

/// Krylov-Bogolyubov average (1/N) sum_{n=1}^{N} P(s, x; t + n tau, A) with
/// t = t_index (s <= t < s + tau) and N = n_periods. When a reference mu_t(A)
/// is given the report holds the comparison at 3 combined SE.
KbReport kb_average(const SdeModel& model, const GridSpec& grid, std::uint64_t master_seed,
                    std::int64_t s_index, double x, std::int64_t t_index, const Interval& a,
                    int n_periods, std::size_t n_mc,
                    std::optional<Estimate> reference = std::nullopt,
                    const RunOptions& options = {});

struct ErgodicReport {
  std::size_t periods = 0;
  /// Birkhoff average with a batch-means SE.
  Estimate time_average;
  std::optional<Estimate> reference;
  double difference = 0.0;
  double combined_se = 0.0;
  bool pass = false;
};

/// (1/N) sum_{n=1}^{N} h(X(s + n tau)) along one path.
ErgodicReport ergodic_time_average(const SdeModel& model, const NoisePath& path,
                                   std::int64_t s_index, double x, const TestFunction& h,
                                   int n_periods,
                                   std::optional<Estimate> reference = std::nullopt);

struct MixingReport {
  std::vector<int> n_values;
  /// |T h(x) - T h(y)| with common noise.
  std::vector<double> pair_estimates;
  std::vector<double> pair_se;
  /// |T h(x) - int h dmu_s|; empty without a reference measure.
  std::vector<double> measure_estimates;
  std::vector<double> measure_se;
  bool has_fit = false;
  double fitted_ratio = 0.0;
  double ratio_se = 0.0;
  double measure_ratio = 0.0;
  /// exp(int_0^tau lambda / p).
  double bound = 0.0;
  bool pass = false;
};

/// Geometric mixing at s + n tau for n in n_list. Pass is decided by the
/// common-noise pair family: fitted ratio <= bound + 3 fit SE. The second
/// family is reported only. Needs `lyap.lambda_rate`.
MixingReport mixing_report(const SdeModel& model, const GridSpec& grid,
                           std::uint64_t master_seed, std::int64_t s_index, double x, double y,
                           const TestFunction& h, std::span<const int> n_list, std::size_t n,
                           const LyapunovSpec& lyap,
                           const EmpiricalMeasure* reference = nullptr,
                           const RunOptions& options = {});

/// Per-replica terms h(X_T) (1/T) sum_k sigma^{-1}(t_k, X_k) v_k dW_k.
std::vector<double> bel_samples(const SdeModel& model, const GridSpec& grid,
                                std::uint64_t master_seed, std::int64_t s_index,
                                std::span<const double> x, std::span<const double> v,
                                const TestFunction& h, std::int64_t horizon_steps,
                                std::size_t n, const RunOptions& options = {});

/// Bismut-Elworthy-Li estimate of D_x E h(X(s + T, s, ., x)) v.
Estimate bel_gradient(const SdeModel& model, const GridSpec& grid, std::uint64_t master_seed,
                      std::int64_t s_index, std::span<const double> x,
                      std::span<const double> v, const TestFunction& h,
                      std::int64_t horizon_steps, std::size_t n,
                      const RunOptions& options = {});

/// Common-noise finite difference (h(X^{x + eps v}) - h(X^x)) / eps.
Estimate finite_difference_gradient(const SdeModel& model, const GridSpec& grid,
                                    std::uint64_t master_seed, std::int64_t s_index,
                                    std::span<const double> x, std::span<const double> v,
                                    const TestFunction& h, std::int64_t horizon_steps,
                                    std::size_t n, double eps = 1e-3,
                                    const RunOptions& options = {});

/// `n,estimate,se` rows.
CsvTable kb_report_csv(const KbReport& report);
CsvTable mixing_report_csv(const MixingReport& report);
CsvTable ergodic_report_csv(const ErgodicReport& report);

}  // namespace rpsde
