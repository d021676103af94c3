#pragma once

#include <cstdint>
#include <vector>

#include "rpsde/model.hpp"
#include "rpsde/noise.hpp"

namespace rpsde {

/// Closed-form references for dX = -alpha(t) X dt + sigma dW with a
/// trigonometric-polynomial alpha.
class LinearOracle {
 public:
  /// Throws InvalidArgument unless int_0^tau alpha > 0 (the stochastic
  /// integral over (-inf, s] must converge).
  explicit LinearOracle(LinearPeriodicSpec spec, double quadrature_tol = 1e-13);

  const LinearPeriodicSpec& spec() const noexcept { return spec_; }
  double period() const noexcept { return period_; }

  /// int_a^b alpha(u) du.
  double alpha_integral(double a, double b) const noexcept;

  /// Same integral between grid nodes, computed from the step count and the
  /// phase-reduced nodes so it is invariant under shifts by whole periods.
  double alpha_integral_nodes(const GridSpec& grid, std::int64_t ka,
                              std::int64_t kb) const noexcept;

  /// S(s, omega) ~ sigma * sum_{k in [s - T, s)} exp(-int_{t_k}^{s} alpha) dW_k,
  /// the left-point discretization of the pullback limit. `truncation_steps`
  /// must span at least five periods.
  double rps_exact(const NoisePath& path, std::int64_t s_index,
                   std::int64_t truncation_steps) const;

  /// rps_exact at nodes s_index .. s_index + nodes - 1. The first value is
  /// the direct sum; later ones use the exact recursion
  /// S_{k+1} = exp(-int_{t_k}^{t_{k+1}} alpha) (S_k + sigma dW_k).
  std::vector<double> rps_window(const NoisePath& path, std::int64_t s_index,
                                 std::int64_t nodes, std::int64_t truncation_steps) const;

  /// v(s) = sigma^2 int_{-inf}^{s} exp(-2 int_r^s alpha) dr, using one period
  /// of adaptive Gauss-Kronrod quadrature and the exact geometric tail factor
  /// 1 / (1 - exp(-2 int_0^tau alpha)).
  double phase_variance(double s) const;

  struct Moments {
    double mean = 0.0;
    double variance = 0.0;
  };

  /// Gaussian law of X(t1, t0, ., x).
  Moments transition(double t0, double t1, double x) const;

 private:
  LinearPeriodicSpec spec_;
  double period_;
  double quadrature_tol_;
};

/// Wrappers with the names used throughout the test-suite.
inline double linear_rps_exact(const LinearOracle& oracle, const NoisePath& path,
                               std::int64_t s_index, std::int64_t truncation_steps) {
  return oracle.rps_exact(path, s_index, truncation_steps);
}
inline double linear_phase_variance(const LinearOracle& oracle, double s) {
  return oracle.phase_variance(s);
}

/// Ornstein-Uhlenbeck transition with constant rate alpha and unit noise:
/// mean x e^{-alpha (t1 - t0)}, variance (1 - e^{-2 alpha (t1 - t0)}) / (2 alpha).
LinearOracle::Moments ou_transition(double alpha, double t0, double t1, double x);

}  // namespace rpsde
