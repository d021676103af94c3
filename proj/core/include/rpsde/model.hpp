#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rpsde {

/// c + sum_j [ s_j sin((j+1) w t) + c_j cos((j+1) w t) ].
struct TrigPoly {
  double constant = 0.0;
  std::vector<double> sin_coef;
  std::vector<double> cos_coef;
  /// Base angular frequency w; the period is 2 pi / w.
  double omega = 1.0;

  double operator()(double t) const noexcept;
  double derivative(double t) const noexcept;
  /// Periodic part of an antiderivative: int_a^b = constant (b - a) + P(b) - P(a).
  double periodic_antiderivative(double t) const noexcept;
  /// Exact integral over [a, b].
  double integral(double a, double b) const noexcept;
  bool has_harmonics() const noexcept;
  double period() const noexcept;
};

/// Coefficient callback: (t, x) -> out. Shapes are documented per field of
/// SdeModel; implementations must be pure and write every entry of `out`.
using CoefficientFn =
    std::function<void(double t, std::span<const double> x, std::span<double> out)>;

/// dX = f_0(t, X) dt + sum_k f_k(t, X) dW^k with tau-periodic coefficients.
struct SdeModel {
  std::string id;
  int state_dim = 1;
  int noise_dim = 1;
  double period = 0.0;

  /// out[i] = f_0^i(t, x); size d.
  CoefficientFn drift;
  /// out[i * m + k] = f_k^i(t, x); size d * m (column k is f_k).
  CoefficientFn diffusion;
  /// out[i * d + j] = d f_0^i / d x_j; size d * d.
  std::optional<CoefficientFn> drift_jacobian;
  /// out[(k * d + i) * d + j] = d f_k^i / d x_j; size m * d * d.
  std::optional<CoefficientFn> diffusion_jacobians;
  /// out[k * d + i], an m x d matrix R with sigma(t, x) R = I_d.
  std::optional<CoefficientFn> diffusion_right_inverse;

  std::size_t d() const noexcept { return static_cast<std::size_t>(state_dim); }
  std::size_t m() const noexcept { return static_cast<std::size_t>(noise_dim); }

  std::vector<double> eval_drift(double t, std::span<const double> x) const;
  std::vector<double> eval_diffusion(double t, std::span<const double> x) const;
};

/// Largest |f(t + tau, x) - f(t, x)| over drift and diffusion entries at
/// `samples` deterministic points with t in [-10 tau, 10 tau], |x_i| <= radius.
double periodicity_defect(const SdeModel& model, int samples, double radius,
                          std::uint64_t seed = 1);

/// Largest |sigma R - I| entry at deterministic sample points; throws
/// CapabilityError when the model carries no right inverse.
double right_inverse_defect(const SdeModel& model, int samples, double radius,
                            std::uint64_t seed = 2);

/// Checks the structural invariants (dimensions, callbacks present, period
/// positive, periodicity within 1e-12, right inverse within 1e-10).
void validate(const SdeModel& model);

// ------------------------------------------------------------ built-ins

/// dX = -alpha(t) X dt + noise_scale dW.
struct LinearPeriodicSpec {
  TrigPoly alpha{1.0, {}, {}, 1.0};
  double noise_scale = 1.0;
  /// Period for a constant alpha; defaults to 2 pi / alpha.omega.
  std::optional<double> period;
};

/// dX = [(-1 + gamma sin t) X - delta X^3] dt + dW.
struct CubicScalarSpec {
  double gamma = 0.0;
  double delta = 0.0;
};

SdeModel build_linear_periodic(const LinearPeriodicSpec& spec);
SdeModel build_cubic_scalar(const CubicScalarSpec& spec);

/// One term c(t) * x_0^e_0 * ... * x_{d-1}^e_{d-1} of a coefficient table.
struct PolyTerm {
  TrigPoly coefficient;
  std::vector<int> exponents;
};

/// User-defined model whose drift and diffusion entries are sums of
/// trig-polynomial-weighted monomials. Jacobians are exact; a right inverse
/// sigma^T (sigma sigma^T)^{-1} is provided when d <= m.
struct PolynomialModelSpec {
  int state_dim = 1;
  int noise_dim = 1;
  double period = 0.0;
  /// drift[i] is the term list of f_0^i.
  std::vector<std::vector<PolyTerm>> drift;
  /// diffusion[i * m + k] is the term list of f_k^i.
  std::vector<std::vector<PolyTerm>> diffusion;
};

SdeModel build_polynomial(const PolynomialModelSpec& spec);

}  // namespace rpsde
