#include "rpsde/lyapunov.hpp"

#include <cmath>

#include "rpsde/error.hpp"
#include "rpsde/linalg.hpp"

namespace rpsde {

LyapunovSpec quadratic_lyapunov(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw InvalidArgument("Lyapunov exponent p must be at least 1");
  }
  LyapunovSpec spec;
  spec.p = p;
  spec.value = [p](double, std::span<const double> x) {
    const double r = norm2(x);
    return p == 2.0 ? r * r : std::pow(r, p);
  };
  spec.gradient = [p](double, std::span<const double> x, std::span<double> out) {
    const double r = norm2(x);
    if (r == 0.0) {
      if (p == 1.0) throw SingularityError("gradient of |x| is undefined at 0");
      for (double& g : out) g = 0.0;
      return;
    }
    const double scale = p * std::pow(r, p - 2.0);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * x[i];
  };
  spec.hessian = [p](double, std::span<const double> x, std::span<double> out) {
    const std::size_t d = x.size();
    const double r = norm2(x);
    if (r == 0.0) {
      if (p < 2.0) throw SingularityError("Hessian of |x|^p is singular at 0 for p < 2");
      const double diag = p == 2.0 ? 2.0 : 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) out[i * d + j] = i == j ? diag : 0.0;
      }
      return;
    }
    const double outer = p * (p - 2.0) * std::pow(r, p - 4.0);
    const double diag = p * std::pow(r, p - 2.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        out[i * d + j] = outer * x[i] * x[j] + (i == j ? diag : 0.0);
      }
    }
  };
  return spec;
}

}  // namespace rpsde
