#include "rpsde/noise.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rpsde/error.hpp"
#include "rpsde/philox.hpp"

namespace rpsde {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Philox4x32::Key key_of(std::uint64_t seed) noexcept {
  return {static_cast<std::uint32_t>(seed),
          static_cast<std::uint32_t>(seed >> 32)};
}

// Both Box-Muller variates of one pair.
void normal_pair(const Philox4x32::Key& key, std::uint32_t component,
                 std::int64_t pair, double& z0, double& z1) noexcept {
  const auto p = static_cast<std::uint64_t>(pair);
  const auto w = Philox4x32::generate(
      {static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32),
       component, 0u},
      key);
  const double u1 = to_open_unit((std::uint64_t{w[0]} << 32) | w[1]);
  const double u2 = to_open_unit((std::uint64_t{w[2]} << 32) | w[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = kTwoPi * u2;
  z0 = r * std::cos(angle);
  z1 = r * std::sin(angle);
}

std::int64_t floor_half(std::int64_t a) noexcept { return a >> 1; }

}  // namespace

double keyed_uniform(std::uint64_t seed, std::uint32_t stream,
                     std::uint64_t index) noexcept {
  const auto w = Philox4x32::generate(
      {static_cast<std::uint32_t>(index),
       static_cast<std::uint32_t>(index >> 32), stream, 0x55u},
      key_of(seed));
  return to_open_unit((std::uint64_t{w[0]} << 32) | w[1]);
}

// ---------------------------------------------------------------- GridSpec

GridSpec::GridSpec(double period, std::int64_t steps_per_period)
    : period_(period), steps_(steps_per_period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw InvalidArgument("grid period must be positive and finite");
  }
  if (steps_per_period < 1) {
    throw InvalidArgument("grid needs at least one step per period");
  }
  dt_ = period_ / static_cast<double>(steps_);
}

GridSpec GridSpec::from_dt(double period, double target_dt) {
  if (!(target_dt > 0.0) || !std::isfinite(target_dt)) {
    throw InvalidArgument("time step must be positive and finite");
  }
  const double n = std::round(period / target_dt);
  return GridSpec(period, std::max<std::int64_t>(1, static_cast<std::int64_t>(n)));
}

std::int64_t GridSpec::index_of(double t) const {
  const double r = t / dt_;
  const double k = std::round(r);
  if (!std::isfinite(r) || std::abs(r - k) > 1e-9 * std::max(1.0, std::abs(r))) {
    std::ostringstream msg;
    msg << "time " << t << " is not aligned with the grid (dt = " << dt_ << ")";
    throw AlignmentError(msg.str());
  }
  return static_cast<std::int64_t>(k);
}

GridSpec GridSpec::coarsened(std::int64_t factor) const {
  if (factor < 1 || steps_ % factor != 0) {
    throw InvalidArgument("coarsening factor must divide the steps per period");
  }
  return GridSpec(period_, steps_ / factor);
}

// --------------------------------------------------------------- NoisePath

NoisePath::NoisePath(std::uint64_t seed, int dim, GridSpec grid)
    : NoisePath(seed, dim, grid, 0, 1) {}

NoisePath::NoisePath(std::uint64_t seed, int dim, GridSpec grid,
                     std::int64_t offset, std::int64_t substeps)
    : seed_(seed), dim_(dim), grid_(grid), offset_(offset), substeps_(substeps) {
  if (dim < 1) throw InvalidArgument("noise dimension must be at least 1");
}

double standard_normal(std::uint64_t seed, std::uint32_t component,
                       std::int64_t index) noexcept {
  double z0 = 0.0;
  double z1 = 0.0;
  const std::int64_t pair = floor_half(index);
  normal_pair(key_of(seed), component, pair, z0, z1);
  return index - 2 * pair == 0 ? z0 : z1;
}

void NoisePath::increment(std::int64_t k, std::span<double> out) const {
  increments(k, 1, out);
}

std::vector<double> NoisePath::increment(std::int64_t k) const {
  std::vector<double> out(static_cast<std::size_t>(dim_));
  increments(k, 1, out);
  return out;
}

void NoisePath::increments(std::int64_t k0, std::int64_t count,
                           std::span<double> out) const {
  if (count <= 0) return;
  if (out.size() < static_cast<std::size_t>(count * dim_)) {
    throw InvalidArgument("increment buffer too small");
  }
  const auto key = key_of(seed_);
  const double scale = std::sqrt(grid_.dt() / static_cast<double>(substeps_));
  const std::int64_t first = (k0 + offset_) * substeps_;
  const std::int64_t fine_count = count * substeps_;
  for (int j = 0; j < dim_; ++j) {
    const auto component = static_cast<std::uint32_t>(j);
    // Walk the fine indices pairwise so each Philox block serves two steps.
    std::int64_t a = first;
    const std::int64_t end = first + fine_count;
    double z0 = 0.0;
    double z1 = 0.0;
    std::int64_t cached_pair = floor_half(a) - 1;
    double acc = 0.0;
    std::int64_t in_step = 0;
    std::int64_t step = 0;
    for (; a < end; ++a) {
      const std::int64_t pair = floor_half(a);
      if (pair != cached_pair) {
        normal_pair(key, component, pair, z0, z1);
        cached_pair = pair;
      }
      acc += (a - 2 * pair == 0) ? z0 : z1;
      if (++in_step == substeps_) {
        out[static_cast<std::size_t>(step * dim_ + j)] = scale * acc;
        acc = 0.0;
        in_step = 0;
        ++step;
      }
    }
  }
}

std::vector<double> NoisePath::increments(std::int64_t k0,
                                          std::int64_t count) const {
  std::vector<double> out(static_cast<std::size_t>(std::max<std::int64_t>(count, 0) * dim_));
  increments(k0, count, out);
  return out;
}

std::vector<double> NoisePath::evaluate(std::int64_t k) const {
  std::vector<double> w(static_cast<std::size_t>(dim_), 0.0);
  if (k == 0) return w;
  const std::int64_t lo = k > 0 ? 0 : k;
  const std::int64_t count = k > 0 ? k : -k;
  const auto inc = increments(lo, count);
  if (k > 0) {
    for (std::int64_t i = 0; i < count; ++i) {
      for (int j = 0; j < dim_; ++j) w[j] += inc[i * dim_ + j];
    }
  } else {
    // omega(k dt) = -(dW_k + ... + dW_{-1}), summed from index -1 downwards.
    for (std::int64_t i = count - 1; i >= 0; --i) {
      for (int j = 0; j < dim_; ++j) w[j] -= inc[i * dim_ + j];
    }
  }
  return w;
}

NoisePath NoisePath::shift(std::int64_t steps) const {
  return NoisePath(seed_, dim_, grid_, offset_ + steps, substeps_);
}

NoisePath NoisePath::coarsened(std::int64_t factor) const {
  const GridSpec coarse = grid_.coarsened(factor);
  if (offset_ % factor != 0) {
    throw InvalidArgument("path offset is not a multiple of the coarsening factor");
  }
  return NoisePath(seed_, dim_, coarse, offset_ / factor, substeps_ * factor);
}

std::string NoisePath::id() const {
  std::ostringstream os;
  os << "seed=" << seed_ << ";offset=" << offset_ << ";substeps=" << substeps_;
  return os.str();
}

std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica) noexcept {
  // master + (i + 1) * golden is injective in i (golden is odd); mix64 is a
  // bijection, so distinct replicas never share a seed.
  return mix64(master + (replica + 1) * 0x9E3779B97F4A7C15ull);
}

std::vector<NoisePath> ensemble(std::uint64_t master, std::size_t n, int dim,
                                const GridSpec& grid, std::uint64_t first) {
  if (n == 0) throw EmptyEnsembleError("ensemble needs at least one replica");
  std::vector<NoisePath> paths;
  paths.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    paths.emplace_back(replica_seed(master, first + i), dim, grid);
  }
  return paths;
}

}  // namespace rpsde
