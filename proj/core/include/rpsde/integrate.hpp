#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rpsde/csv.hpp"
#include "rpsde/model.hpp"
#include "rpsde/noise.hpp"

namespace rpsde {

enum class Scheme { euler, milstein };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

/// States on every grid node of [k0 dt, k1 dt], inclusive.
struct Trajectory {
  GridSpec grid{1.0, 1};
  std::int64_t k0 = 0;
  std::int64_t k1 = 0;
  int dim = 1;
  /// Node-major: states[(k - k0) * dim + i].
  std::vector<double> states;
  std::string model_id;
  std::string path_id;
  Scheme scheme = Scheme::euler;

  std::size_t nodes() const noexcept { return static_cast<std::size_t>(k1 - k0 + 1); }
  double t0() const noexcept { return grid.time(k0); }
  double t1() const noexcept { return grid.time(k1); }
  std::span<const double> at(std::size_t node) const {
    return std::span<const double>(states).subspan(node * static_cast<std::size_t>(dim),
                                                   static_cast<std::size_t>(dim));
  }
  std::span<const double> final_state() const { return at(nodes() - 1); }
};

/// Single-step engine shared by every simulation routine.
///
/// Coefficients at step k are evaluated at the phase-reduced time
/// (k mod N) dt. For tau-periodic coefficients this is the same function of t,
/// and it makes the discrete flow exactly conjugate under theta_tau shifts.
class Stepper {
 public:
  Stepper(const SdeModel& model, const GridSpec& grid, Scheme scheme);

  /// x <- x + f0 dt + sigma dW (+ Milstein correction). Throws
  /// DivergenceError carrying `k` if the result is not finite.
  void step(std::int64_t k, std::span<double> x, std::span<const double> dw);

  /// Steps k0 .. k0 + count - 1 with a step-major increment block.
  void advance(std::int64_t k0, std::int64_t count, std::span<double> x,
               std::span<const double> dws);

  /// Euler step of the pair (x, v) where v follows the linearized equation
  /// v <- v + J_f v dt + sum_k J_k v dW^k; Jacobians are taken at the old x.
  void step_tangent(std::int64_t k, std::span<double> x, std::span<double> v,
                    std::span<const double> dw);

  const SdeModel& model() const noexcept { return *model_; }
  const GridSpec& grid() const noexcept { return grid_; }

 private:
  const SdeModel* model_;
  GridSpec grid_;
  Scheme scheme_;
  std::vector<double> f_;
  std::vector<double> sigma_;
  std::vector<double> jac_;
  std::vector<double> djac_;
  std::vector<double> tmp_;
};

/// Throws GridMismatchError unless the model period equals the grid period
/// and the path dimension equals the model noise dimension.
void check_compatible(const SdeModel& model, const NoisePath& path);

Trajectory integrate(const SdeModel& model, const NoisePath& path, std::int64_t k0,
                     std::int64_t k1, std::span<const double> x0,
                     Scheme scheme = Scheme::euler);

/// Time-based overload; t0 and t1 must be grid nodes (AlignmentError otherwise).
Trajectory integrate_times(const SdeModel& model, const NoisePath& path, double t0, double t1,
                     std::span<const double> x0, Scheme scheme = Scheme::euler);

/// Final state only, without storing the trajectory.
std::vector<double> integrate_final(const SdeModel& model, const NoisePath& path,
                                    std::int64_t k0, std::int64_t k1,
                                    std::span<const double> x0,
                                    Scheme scheme = Scheme::euler);

/// Two solutions driven by the same increments.
std::pair<Trajectory, Trajectory> integrate_pair(const SdeModel& model,
                                                 const NoisePath& path, std::int64_t k0,
                                                 std::int64_t k1,
                                                 std::span<const double> x0,
                                                 std::span<const double> y0,
                                                 Scheme scheme = Scheme::euler);

/// Tangent trajectory v_k = D_x X(t_k, t_0, omega, x0) v under the Euler
/// scheme; requires drift and diffusion Jacobians (CapabilityError otherwise).
Trajectory derivative_flow(const SdeModel& model, const NoisePath& path,
                           std::int64_t k0, std::int64_t k1, std::span<const double> x0,
                           std::span<const double> v);

/// CSV with header `t,x1..xd`, one row per node.
CsvTable trajectory_csv(const Trajectory& trajectory);

}  // namespace rpsde
