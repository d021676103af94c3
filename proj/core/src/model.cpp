#include "rpsde/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rpsde/error.hpp"
#include "rpsde/linalg.hpp"
#include "rpsde/philox.hpp"

namespace rpsde {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

// ---------------------------------------------------------------- TrigPoly

double TrigPoly::operator()(double t) const noexcept {
  double v = constant;
  for (std::size_t j = 0; j < sin_coef.size(); ++j) {
    v += sin_coef[j] * std::sin(static_cast<double>(j + 1) * omega * t);
  }
  for (std::size_t j = 0; j < cos_coef.size(); ++j) {
    v += cos_coef[j] * std::cos(static_cast<double>(j + 1) * omega * t);
  }
  return v;
}

double TrigPoly::derivative(double t) const noexcept {
  double v = 0.0;
  for (std::size_t j = 0; j < sin_coef.size(); ++j) {
    const double w = static_cast<double>(j + 1) * omega;
    v += sin_coef[j] * w * std::cos(w * t);
  }
  for (std::size_t j = 0; j < cos_coef.size(); ++j) {
    const double w = static_cast<double>(j + 1) * omega;
    v -= cos_coef[j] * w * std::sin(w * t);
  }
  return v;
}

double TrigPoly::periodic_antiderivative(double t) const noexcept {
  double v = 0.0;
  for (std::size_t j = 0; j < sin_coef.size(); ++j) {
    const double w = static_cast<double>(j + 1) * omega;
    v -= sin_coef[j] * std::cos(w * t) / w;
  }
  for (std::size_t j = 0; j < cos_coef.size(); ++j) {
    const double w = static_cast<double>(j + 1) * omega;
    v += cos_coef[j] * std::sin(w * t) / w;
  }
  return v;
}

double TrigPoly::integral(double a, double b) const noexcept {
  return constant * (b - a) + periodic_antiderivative(b) - periodic_antiderivative(a);
}

bool TrigPoly::has_harmonics() const noexcept {
  for (double c : sin_coef) {
    if (c != 0.0) return true;
  }
  for (double c : cos_coef) {
    if (c != 0.0) return true;
  }
  return false;
}

double TrigPoly::period() const noexcept { return kTwoPi / omega; }

// ---------------------------------------------------------------- SdeModel

std::vector<double> SdeModel::eval_drift(double t, std::span<const double> x) const {
  std::vector<double> out(d());
  drift(t, x, out);
  return out;
}

std::vector<double> SdeModel::eval_diffusion(double t, std::span<const double> x) const {
  std::vector<double> out(d() * m());
  diffusion(t, x, out);
  return out;
}

namespace {

struct SamplePoint {
  double t;
  std::vector<double> x;
};

SamplePoint sample_point(const SdeModel& model, std::uint64_t seed, int i,
                         double radius) {
  SamplePoint p;
  const auto idx = static_cast<std::uint64_t>(i);
  p.t = model.period * (20.0 * keyed_uniform(seed, 0, idx) - 10.0);
  p.x.resize(model.d());
  for (std::size_t j = 0; j < model.d(); ++j) {
    p.x[j] = radius * (2.0 * keyed_uniform(seed, static_cast<std::uint32_t>(j + 1), idx) - 1.0);
  }
  return p;
}

}  // namespace

double periodicity_defect(const SdeModel& model, int samples, double radius,
                          std::uint64_t seed) {
  double worst = 0.0;
  std::vector<double> a(model.d()), b(model.d());
  std::vector<double> sa(model.d() * model.m()), sb(model.d() * model.m());
  for (int i = 0; i < samples; ++i) {
    const auto p = sample_point(model, seed, i, radius);
    model.drift(p.t, p.x, a);
    model.drift(p.t + model.period, p.x, b);
    for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
    model.diffusion(p.t, p.x, sa);
    model.diffusion(p.t + model.period, p.x, sb);
    for (std::size_t j = 0; j < sa.size(); ++j) worst = std::max(worst, std::abs(sa[j] - sb[j]));
  }
  return worst;
}

double right_inverse_defect(const SdeModel& model, int samples, double radius,
                            std::uint64_t seed) {
  if (!model.diffusion_right_inverse) {
    throw CapabilityError("model " + model.id + " has no diffusion right inverse");
  }
  const std::size_t d = model.d();
  const std::size_t m = model.m();
  double worst = 0.0;
  std::vector<double> sigma(d * m), inv(m * d);
  for (int i = 0; i < samples; ++i) {
    const auto p = sample_point(model, seed, i, radius);
    model.diffusion(p.t, p.x, sigma);
    (*model.diffusion_right_inverse)(p.t, p.x, inv);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += sigma[r * m + k] * inv[k * d + c];
        worst = std::max(worst, std::abs(s - (r == c ? 1.0 : 0.0)));
      }
    }
  }
  return worst;
}

void validate(const SdeModel& model) {
  if (model.state_dim < 1 || model.noise_dim < 1) {
    throw InvalidArgument("model dimensions must be positive");
  }
  if (!(model.period > 0.0) || !std::isfinite(model.period)) {
    throw InvalidArgument("model period must be positive");
  }
  if (!model.drift || !model.diffusion) {
    throw InvalidArgument("model needs drift and diffusion callbacks");
  }
  const double per = periodicity_defect(model, 100, 5.0);
  if (per > 1e-12) {
    std::ostringstream os;
    os << "model " << model.id << " is not periodic: defect " << per;
    throw InvalidArgument(os.str());
  }
  if (model.diffusion_right_inverse) {
    const double inv = right_inverse_defect(model, 100, 5.0);
    if (inv > 1e-10) {
      std::ostringstream os;
      os << "model " << model.id << " right inverse defect " << inv;
      throw InvalidArgument(os.str());
    }
  }
}

// ---------------------------------------------------------------- builders

SdeModel build_linear_periodic(const LinearPeriodicSpec& spec) {
  if (!(spec.noise_scale >= 0.0)) throw InvalidArgument("noise_scale must be nonnegative");
  if (!(spec.alpha.omega > 0.0)) throw InvalidArgument("alpha frequency must be positive");
  double period = spec.alpha.period();
  if (spec.period) {
    if (!(*spec.period > 0.0)) throw InvalidArgument("period must be positive");
    if (spec.alpha.has_harmonics() &&
        std::abs(*spec.period - period) > 1e-12 * period) {
      throw InvalidArgument("a non-constant alpha fixes the period to 2 pi / omega");
    }
    period = *spec.period;
  }

  const TrigPoly alpha = spec.alpha;
  const double scale = spec.noise_scale;
  SdeModel model;
  std::ostringstream id;
  id << "linear(alpha0=" << alpha.constant << ",harmonics="
     << std::max(alpha.sin_coef.size(), alpha.cos_coef.size())
     << ",noise=" << scale << ")";
  model.id = id.str();
  model.period = period;
  model.drift = [alpha](double t, std::span<const double> x, std::span<double> out) {
    out[0] = -alpha(t) * x[0];
  };
  model.diffusion = [scale](double, std::span<const double>, std::span<double> out) {
    out[0] = scale;
  };
  model.drift_jacobian = [alpha](double t, std::span<const double>, std::span<double> out) {
    out[0] = -alpha(t);
  };
  model.diffusion_jacobians = [](double, std::span<const double>, std::span<double> out) {
    out[0] = 0.0;
  };
  if (scale > 0.0) {
    model.diffusion_right_inverse = [scale](double, std::span<const double>,
                                            std::span<double> out) { out[0] = 1.0 / scale; };
  }
  return model;
}

SdeModel build_cubic_scalar(const CubicScalarSpec& spec) {
  if (!(spec.delta >= 0.0)) throw InvalidArgument("delta must be nonnegative");
  if (!std::isfinite(spec.gamma)) throw InvalidArgument("gamma must be finite");
  const double gamma = spec.gamma;
  const double delta = spec.delta;
  SdeModel model;
  std::ostringstream id;
  id << "cubic(gamma=" << gamma << ",delta=" << delta << ")";
  model.id = id.str();
  model.period = kTwoPi;
  model.drift = [gamma, delta](double t, std::span<const double> x, std::span<double> out) {
    const double v = x[0];
    out[0] = (-1.0 + gamma * std::sin(t)) * v - delta * v * v * v;
  };
  model.diffusion = [](double, std::span<const double>, std::span<double> out) {
    out[0] = 1.0;
  };
  model.drift_jacobian = [gamma, delta](double t, std::span<const double> x,
                                        std::span<double> out) {
    out[0] = (-1.0 + gamma * std::sin(t)) - 3.0 * delta * x[0] * x[0];
  };
  model.diffusion_jacobians = [](double, std::span<const double>, std::span<double> out) {
    out[0] = 0.0;
  };
  model.diffusion_right_inverse = [](double, std::span<const double>, std::span<double> out) {
    out[0] = 1.0;
  };
  return model;
}

// -------------------------------------------------------------- polynomial

namespace {

double monomial(std::span<const double> x, const std::vector<int>& e) {
  double v = 1.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    for (int p = 0; p < e[j]; ++p) v *= x[j];
  }
  return v;
}

// d/dx_l of the monomial.
double monomial_derivative(std::span<const double> x, const std::vector<int>& e,
                           std::size_t l) {
  if (e[l] == 0) return 0.0;
  double v = static_cast<double>(e[l]);
  for (std::size_t j = 0; j < e.size(); ++j) {
    const int power = j == l ? e[j] - 1 : e[j];
    for (int p = 0; p < power; ++p) v *= x[j];
  }
  return v;
}

double eval_terms(const std::vector<PolyTerm>& terms, double t,
                  std::span<const double> x) {
  double v = 0.0;
  for (const auto& term : terms) v += term.coefficient(t) * monomial(x, term.exponents);
  return v;
}

double eval_terms_derivative(const std::vector<PolyTerm>& terms, double t,
                             std::span<const double> x, std::size_t l) {
  double v = 0.0;
  for (const auto& term : terms) {
    v += term.coefficient(t) * monomial_derivative(x, term.exponents, l);
  }
  return v;
}

}  // namespace

SdeModel build_polynomial(const PolynomialModelSpec& spec) {
  const int d = spec.state_dim;
  const int m = spec.noise_dim;
  if (d < 1 || m < 1) throw InvalidArgument("polynomial model dimensions must be positive");
  if (!(spec.period > 0.0)) throw InvalidArgument("polynomial model period must be positive");
  if (spec.drift.size() != static_cast<std::size_t>(d)) {
    throw InvalidArgument("polynomial model needs one drift table per state component");
  }
  if (spec.diffusion.size() != static_cast<std::size_t>(d * m)) {
    throw InvalidArgument("polynomial model needs d * m diffusion tables");
  }
  const double omega = kTwoPi / spec.period;
  auto normalize = [&](std::vector<std::vector<PolyTerm>> tables) {
    for (auto& table : tables) {
      for (auto& term : table) {
        if (term.exponents.empty()) term.exponents.assign(static_cast<std::size_t>(d), 0);
        if (term.exponents.size() != static_cast<std::size_t>(d)) {
          throw InvalidArgument("monomial exponent count must equal the state dimension");
        }
        for (int e : term.exponents) {
          if (e < 0) throw InvalidArgument("monomial exponents must be nonnegative");
        }
        term.coefficient.omega = omega;
      }
    }
    return tables;
  };
  const auto drift = normalize(spec.drift);
  const auto diffusion = normalize(spec.diffusion);

  SdeModel model;
  model.id = "polynomial(d=" + std::to_string(d) + ",m=" + std::to_string(m) + ")";
  model.state_dim = d;
  model.noise_dim = m;
  model.period = spec.period;
  model.drift = [drift](double t, std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < drift.size(); ++i) out[i] = eval_terms(drift[i], t, x);
  };
  model.diffusion = [diffusion](double t, std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < diffusion.size(); ++i) out[i] = eval_terms(diffusion[i], t, x);
  };
  const auto du = static_cast<std::size_t>(d);
  const auto mu = static_cast<std::size_t>(m);
  model.drift_jacobian = [drift, du](double t, std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < du; ++i) {
      for (std::size_t j = 0; j < du; ++j) out[i * du + j] = eval_terms_derivative(drift[i], t, x, j);
    }
  };
  model.diffusion_jacobians = [diffusion, du, mu](double t, std::span<const double> x,
                                                  std::span<double> out) {
    for (std::size_t k = 0; k < mu; ++k) {
      for (std::size_t i = 0; i < du; ++i) {
        for (std::size_t j = 0; j < du; ++j) {
          out[(k * du + i) * du + j] = eval_terms_derivative(diffusion[i * mu + k], t, x, j);
        }
      }
    }
  };
  if (d <= m) {
    model.diffusion_right_inverse = [diffusion, du, mu](double t, std::span<const double> x,
                                                        std::span<double> out) {
      std::vector<double> sigma(du * mu);
      for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = eval_terms(diffusion[i], t, x);
      right_pseudo_inverse(sigma, du, mu, out);
    };
  }
  return model;
}

}  // namespace rpsde
