#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rpsde {

/// Uniform time grid whose period is an exact number of steps.
///
/// The step is derived as dt = period / steps_per_period, so t = k * dt and
/// phase(k) = (k mod N) * dt are always consistent with the period.
class GridSpec {
 public:
  GridSpec(double period, std::int64_t steps_per_period);

  /// Grid with the step closest to `target_dt` that divides the period.
  static GridSpec from_dt(double period, double target_dt);

  double period() const noexcept { return period_; }
  std::int64_t steps_per_period() const noexcept { return steps_; }
  double dt() const noexcept { return dt_; }

  double time(std::int64_t k) const noexcept {
    return static_cast<double>(k) * dt_;
  }

  /// Time of the phase-reduced node, in [0, period).
  double phase_time(std::int64_t k) const noexcept {
    return static_cast<double>(phase_index(k)) * dt_;
  }
  std::int64_t phase_index(std::int64_t k) const noexcept {
    const std::int64_t r = k % steps_;
    return r < 0 ? r + steps_ : r;
  }

  /// Grid index of `t`; throws AlignmentError if `t` is not a grid node.
  std::int64_t index_of(double t) const;

  /// Coarser grid with `factor` fine steps per coarse step.
  GridSpec coarsened(std::int64_t factor) const;

  bool operator==(const GridSpec& other) const noexcept {
    return period_ == other.period_ && steps_ == other.steps_;
  }

 private:
  double period_;
  std::int64_t steps_;
  double dt_;
};

/// A discrete two-sided Wiener path on a uniform grid.
///
/// Increments are generated on demand from a counter-based generator keyed by
/// the absolute grid index, so the path is immutable, order independent and
/// extends to negative times without changing earlier values. Gaussian
/// variates use the pinned transform:
///
///   a       = absolute fine index, pair = floor(a / 2), lane = a - 2 pair
///   (w0..w3)= Philox4x32-10(counter = {lo(pair), hi(pair), component, 0},
///                           key = {lo(seed), hi(seed)})
///   u1      = ((w0:w1 >> 11) + 0.5) 2^-53,   u2 likewise from w2:w3
///   z       = sqrt(-2 ln u1) * (lane == 0 ? cos(2 pi u2) : sin(2 pi u2))
///
/// and increment(k) = sqrt(dt / r) * sum_{i<r} z((k + offset) r + i), where r
/// is the number of fine substeps per step (1 unless the path was coarsened).
class NoisePath {
 public:
  NoisePath(std::uint64_t seed, int dim, GridSpec grid);

  std::uint64_t seed() const noexcept { return seed_; }
  int dim() const noexcept { return dim_; }
  const GridSpec& grid() const noexcept { return grid_; }
  std::int64_t offset() const noexcept { return offset_; }
  std::int64_t substeps() const noexcept { return substeps_; }

  /// W((k+1) dt) - W(k dt), one value per noise component.
  std::vector<double> increment(std::int64_t k) const;
  void increment(std::int64_t k, std::span<double> out) const;

  /// Increments for steps k0 .. k0 + count - 1, stored step-major
  /// (out[i * dim + j] is component j of step k0 + i).
  void increments(std::int64_t k0, std::int64_t count,
                  std::span<double> out) const;
  std::vector<double> increments(std::int64_t k0, std::int64_t count) const;

  /// omega(k dt): signed cumulative sum of increments from index 0.
  std::vector<double> evaluate(std::int64_t k) const;

  /// The shifted path theta_{steps * dt} omega.
  NoisePath shift(std::int64_t steps) const;

  /// The same Brownian path observed on a grid `factor` times coarser.
  NoisePath coarsened(std::int64_t factor) const;

  /// Stable identifier used in reports.
  std::string id() const;

 private:
  NoisePath(std::uint64_t seed, int dim, GridSpec grid, std::int64_t offset,
            std::int64_t substeps);

  std::uint64_t seed_;
  int dim_;
  GridSpec grid_;
  std::int64_t offset_ = 0;
  std::int64_t substeps_ = 1;
};

/// Standard normal variate number `index` of component `component`.
double standard_normal(std::uint64_t seed, std::uint32_t component,
                       std::int64_t index) noexcept;

/// Seed of replica `replica` derived from `master`; injective in `replica`.
std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica) noexcept;

/// Independent replica paths `first .. first + n - 1`.
std::vector<NoisePath> ensemble(std::uint64_t master, std::size_t n, int dim,
                                const GridSpec& grid, std::uint64_t first = 0);

}  // namespace rpsde
