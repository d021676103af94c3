#include "rpsde/oracle.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rpsde/error.hpp"

namespace rpsde {

LinearOracle::LinearOracle(LinearPeriodicSpec spec, double quadrature_tol)
    : spec_(std::move(spec)), quadrature_tol_(quadrature_tol) {
  // Reuse the model builder's validation of the period and noise scale.
  period_ = build_linear_periodic(spec_).period;
  if (!(alpha_integral(0.0, period_) > 0.0)) {
    throw InvalidArgument(
        "linear oracle needs a positive mean rate (int_0^tau alpha > 0) for the "
        "stochastic integral to converge");
  }
}

double LinearOracle::alpha_integral(double a, double b) const noexcept {
  return spec_.alpha.integral(a, b);
}

double LinearOracle::alpha_integral_nodes(const GridSpec& grid, std::int64_t ka,
                                          std::int64_t kb) const noexcept {
  const auto& alpha = spec_.alpha;
  const double span = static_cast<double>(kb - ka) * grid.dt();
  return alpha.constant * span + alpha.periodic_antiderivative(grid.phase_time(kb)) -
         alpha.periodic_antiderivative(grid.phase_time(ka));
}

double LinearOracle::rps_exact(const NoisePath& path, std::int64_t s_index,
                               std::int64_t truncation_steps) const {
  const GridSpec& grid = path.grid();
  if (std::abs(grid.period() - period_) > 1e-12 * period_) {
    throw GridMismatchError("noise grid period differs from the oracle period");
  }
  if (truncation_steps < 5 * grid.steps_per_period()) {
    throw InvalidArgument("oracle truncation must span at least five periods");
  }
  if (path.dim() != 1) throw CapabilityError("linear oracle is scalar");
  const std::int64_t k0 = s_index - truncation_steps;
  const auto dws = path.increments(k0, truncation_steps);
  double sum = 0.0;
  for (std::int64_t i = 0; i < truncation_steps; ++i) {
    sum += std::exp(-alpha_integral_nodes(grid, k0 + i, s_index)) *
           dws[static_cast<std::size_t>(i)];
  }
  return spec_.noise_scale * sum;
}

std::vector<double> LinearOracle::rps_window(const NoisePath& path, std::int64_t s_index,
                                             std::int64_t nodes,
                                             std::int64_t truncation_steps) const {
  if (nodes < 1) throw InvalidArgument("oracle window needs at least one node");
  std::vector<double> out(static_cast<std::size_t>(nodes));
  out[0] = rps_exact(path, s_index, truncation_steps);
  const auto dws = path.increments(s_index, nodes - 1);
  const GridSpec& grid = path.grid();
  for (std::int64_t i = 1; i < nodes; ++i) {
    const std::int64_t k = s_index + i - 1;
    const double decay = std::exp(-alpha_integral_nodes(grid, k, k + 1));
    out[static_cast<std::size_t>(i)] =
        decay * (out[static_cast<std::size_t>(i - 1)] +
                 spec_.noise_scale * dws[static_cast<std::size_t>(i - 1)]);
  }
  return out;
}

double LinearOracle::phase_variance(double s) const {
  const double a_period = alpha_integral(0.0, period_);
  auto integrand = [&](double r) { return std::exp(-2.0 * alpha_integral(r, s)); };
  const double one_period = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, s - period_, s, 20, quadrature_tol_);
  const double sigma2 = spec_.noise_scale * spec_.noise_scale;
  return sigma2 * one_period / (1.0 - std::exp(-2.0 * a_period));
}

LinearOracle::Moments LinearOracle::transition(double t0, double t1, double x) const {
  if (t1 < t0) throw InvalidArgument("transition needs t0 <= t1");
  Moments out;
  out.mean = x * std::exp(-alpha_integral(t0, t1));
  if (t1 == t0) return out;
  auto integrand = [&](double r) { return std::exp(-2.0 * alpha_integral(r, t1)); };
  out.variance = spec_.noise_scale * spec_.noise_scale *
                 boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                     integrand, t0, t1, 20, quadrature_tol_);
  return out;
}

LinearOracle::Moments ou_transition(double alpha, double t0, double t1, double x) {
  if (!(alpha > 0.0)) throw InvalidArgument("OU transition needs a positive rate");
  if (t1 < t0) throw InvalidArgument("transition needs t0 <= t1");
  const double h = t1 - t0;
  return {x * std::exp(-alpha * h), -std::expm1(-2.0 * alpha * h) / (2.0 * alpha)};
}

}  // namespace rpsde
