#pragma once

#include <functional>
#include <span>

namespace rpsde {

/// Test function V(t, x) >= |x|^p with V(t, 0) = 0, its derivatives and an
/// optional rate lambda(t) for the bound L2 V <= lambda V.
struct LyapunovSpec {
  std::function<double(double t, std::span<const double> x)> value;
  /// out[i] = dV/dx_i.
  std::function<void(double t, std::span<const double> x, std::span<double> out)> gradient;
  /// out[i * d + j] = d^2 V / dx_i dx_j.
  std::function<void(double t, std::span<const double> x, std::span<double> out)> hessian;
  /// dV/dt; empty means V is time independent.
  std::function<double(double t, std::span<const double> x)> time_derivative;
  double p = 2.0;
  /// lambda(t); empty until attached by the caller.
  std::function<double(double t)> lambda_rate;
};

/// V(t, x) = |x|^p with exact gradient p x |x|^{p-2} and Hessian
/// p (p - 2) x x^T |x|^{p-4} + p |x|^{p-2} I. At x = 0 the gradient is 0 for
/// p > 1 and the Hessian is 2 I for p = 2, 0 for p > 2; p < 2 throws
/// SingularityError there (and p = 1 does so for the gradient as well).
LyapunovSpec quadratic_lyapunov(double p = 2.0);

}  // namespace rpsde
