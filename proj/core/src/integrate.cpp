#include "rpsde/integrate.hpp"

#include <cmath>
#include <sstream>

#include "rpsde/error.hpp"

namespace rpsde {

namespace {

// Increments are pulled from the path in blocks of this many steps.
constexpr std::int64_t kBlock = 4096;

void throw_divergence(std::int64_t k) {
  std::ostringstream os;
  os << "state became non-finite at step " << k;
  throw DivergenceError(os.str(), k);
}

bool all_finite(std::span<const double> x) noexcept {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void check_range(std::int64_t k0, std::int64_t k1) {
  if (k1 < k0) throw InvalidArgument("integration needs t0 <= t1");
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::euler ? "euler" : "milstein"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "euler") return Scheme::euler;
  if (name == "milstein") return Scheme::milstein;
  throw InvalidArgument("unknown scheme '" + name + "' (expected euler or milstein)");
}

Stepper::Stepper(const SdeModel& model, const GridSpec& grid, Scheme scheme)
    : model_(&model), grid_(grid), scheme_(scheme) {
  if (std::abs(model.period - grid.period()) > 1e-12 * model.period) {
    throw GridMismatchError("model period differs from the grid period");
  }
  if (scheme == Scheme::milstein &&
      (model.state_dim != 1 || model.noise_dim != 1 || !model.diffusion_jacobians)) {
    throw CapabilityError("milstein needs a scalar model with a diffusion Jacobian");
  }
  const std::size_t d = model.d();
  const std::size_t m = model.m();
  f_.resize(d);
  sigma_.resize(d * m);
  jac_.resize(d * d);
  djac_.resize(m * d * d);
  tmp_.resize(d);
}

void Stepper::step(std::int64_t k, std::span<double> x, std::span<const double> dw) {
  const double t = grid_.phase_time(k);
  const double dt = grid_.dt();
  const std::size_t d = model_->d();
  const std::size_t m = model_->m();
  model_->drift(t, x, f_);
  model_->diffusion(t, x, sigma_);
  if (d == 1 && m == 1) {
    double next = x[0] + f_[0] * dt + sigma_[0] * dw[0];
    if (scheme_ == Scheme::milstein) {
      (*model_->diffusion_jacobians)(t, x, djac_);
      next += 0.5 * sigma_[0] * djac_[0] * (dw[0] * dw[0] - dt);
    }
    x[0] = next;
  } else {
    for (std::size_t i = 0; i < d; ++i) {
      double inc = f_[i] * dt;
      for (std::size_t j = 0; j < m; ++j) inc += sigma_[i * m + j] * dw[j];
      x[i] += inc;
    }
  }
  if (!all_finite(x)) throw_divergence(k);
}

void Stepper::advance(std::int64_t k0, std::int64_t count, std::span<double> x,
                      std::span<const double> dws) {
  const std::size_t m = model_->m();
  for (std::int64_t i = 0; i < count; ++i) {
    step(k0 + i, x, dws.subspan(static_cast<std::size_t>(i) * m, m));
  }
}

void Stepper::step_tangent(std::int64_t k, std::span<double> x, std::span<double> v,
                           std::span<const double> dw) {
  if (!model_->drift_jacobian || !model_->diffusion_jacobians) {
    throw CapabilityError("derivative flow needs drift and diffusion Jacobians");
  }
  const double t = grid_.phase_time(k);
  const double dt = grid_.dt();
  const std::size_t d = model_->d();
  const std::size_t m = model_->m();
  (*model_->drift_jacobian)(t, x, jac_);
  (*model_->diffusion_jacobians)(t, x, djac_);
  for (std::size_t i = 0; i < d; ++i) {
    double inc = 0.0;
    for (std::size_t j = 0; j < d; ++j) inc += jac_[i * d + j] * v[j];
    inc *= dt;
    for (std::size_t kk = 0; kk < m; ++kk) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += djac_[(kk * d + i) * d + j] * v[j];
      inc += s * dw[kk];
    }
    tmp_[i] = v[i] + inc;
  }
  for (std::size_t i = 0; i < d; ++i) v[i] = tmp_[i];
  if (!all_finite(v)) throw_divergence(k);
  step(k, x, dw);
}

void check_compatible(const SdeModel& model, const NoisePath& path) {
  if (std::abs(model.period - path.grid().period()) > 1e-12 * model.period) {
    throw GridMismatchError("model period differs from the noise grid period");
  }
  if (path.dim() != model.noise_dim) {
    throw GridMismatchError("noise path dimension differs from the model noise dimension");
  }
}

namespace {

void check_state(const SdeModel& model, std::span<const double> x, const char* what) {
  if (x.size() != model.d()) {
    throw InvalidArgument(std::string(what) + " has the wrong dimension");
  }
}

Trajectory make_trajectory(const SdeModel& model, const NoisePath& path, std::int64_t k0,
                           std::int64_t k1, Scheme scheme) {
  Trajectory tr;
  tr.grid = path.grid();
  tr.k0 = k0;
  tr.k1 = k1;
  tr.dim = model.state_dim;
  tr.model_id = model.id;
  tr.path_id = path.id();
  tr.scheme = scheme;
  tr.states.resize(tr.nodes() * model.d());
  return tr;
}

}  // namespace

Trajectory integrate(const SdeModel& model, const NoisePath& path, std::int64_t k0,
                     std::int64_t k1, std::span<const double> x0, Scheme scheme) {
  check_compatible(model, path);
  check_range(k0, k1);
  check_state(model, x0, "initial state");
  Stepper stepper(model, path.grid(), scheme);
  Trajectory tr = make_trajectory(model, path, k0, k1, scheme);
  const std::size_t d = model.d();
  const std::size_t m = model.m();
  std::vector<double> x(x0.begin(), x0.end());
  std::copy(x.begin(), x.end(), tr.states.begin());
  std::vector<double> dws;
  for (std::int64_t start = k0; start < k1; start += kBlock) {
    const std::int64_t count = std::min(kBlock, k1 - start);
    dws.resize(static_cast<std::size_t>(count) * m);
    path.increments(start, count, dws);
    for (std::int64_t i = 0; i < count; ++i) {
      stepper.step(start + i, x, std::span<const double>(dws).subspan(static_cast<std::size_t>(i) * m, m));
      std::copy(x.begin(), x.end(),
                tr.states.begin() + static_cast<std::ptrdiff_t>((start + i + 1 - k0) * static_cast<std::int64_t>(d)));
    }
  }
  return tr;
}

Trajectory integrate_times(const SdeModel& model, const NoisePath& path, double t0, double t1,
                     std::span<const double> x0, Scheme scheme) {
  return integrate(model, path, path.grid().index_of(t0), path.grid().index_of(t1), x0,
                   scheme);
}

std::vector<double> integrate_final(const SdeModel& model, const NoisePath& path,
                                    std::int64_t k0, std::int64_t k1,
                                    std::span<const double> x0, Scheme scheme) {
  check_compatible(model, path);
  check_range(k0, k1);
  check_state(model, x0, "initial state");
  Stepper stepper(model, path.grid(), scheme);
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> dws;
  for (std::int64_t start = k0; start < k1; start += kBlock) {
    const std::int64_t count = std::min(kBlock, k1 - start);
    dws.resize(static_cast<std::size_t>(count) * model.m());
    path.increments(start, count, dws);
    stepper.advance(start, count, x, dws);
  }
  return x;
}

std::pair<Trajectory, Trajectory> integrate_pair(const SdeModel& model,
                                                 const NoisePath& path, std::int64_t k0,
                                                 std::int64_t k1,
                                                 std::span<const double> x0,
                                                 std::span<const double> y0,
                                                 Scheme scheme) {
  check_compatible(model, path);
  check_range(k0, k1);
  check_state(model, x0, "first initial state");
  check_state(model, y0, "second initial state");
  Stepper sx(model, path.grid(), scheme);
  Stepper sy(model, path.grid(), scheme);
  Trajectory tx = make_trajectory(model, path, k0, k1, scheme);
  Trajectory ty = make_trajectory(model, path, k0, k1, scheme);
  const std::size_t d = model.d();
  const std::size_t m = model.m();
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> y(y0.begin(), y0.end());
  std::copy(x.begin(), x.end(), tx.states.begin());
  std::copy(y.begin(), y.end(), ty.states.begin());
  std::vector<double> dws;
  for (std::int64_t start = k0; start < k1; start += kBlock) {
    const std::int64_t count = std::min(kBlock, k1 - start);
    dws.resize(static_cast<std::size_t>(count) * m);
    path.increments(start, count, dws);
    for (std::int64_t i = 0; i < count; ++i) {
      const auto dw = std::span<const double>(dws).subspan(static_cast<std::size_t>(i) * m, m);
      sx.step(start + i, x, dw);
      sy.step(start + i, y, dw);
      const auto off = static_cast<std::ptrdiff_t>((start + i + 1 - k0) * static_cast<std::int64_t>(d));
      std::copy(x.begin(), x.end(), tx.states.begin() + off);
      std::copy(y.begin(), y.end(), ty.states.begin() + off);
    }
  }
  return {std::move(tx), std::move(ty)};
}

Trajectory derivative_flow(const SdeModel& model, const NoisePath& path,
                           std::int64_t k0, std::int64_t k1, std::span<const double> x0,
                           std::span<const double> v0) {
  check_compatible(model, path);
  check_range(k0, k1);
  check_state(model, x0, "initial state");
  check_state(model, v0, "tangent vector");
  if (!model.drift_jacobian || !model.diffusion_jacobians) {
    throw CapabilityError("derivative flow needs drift and diffusion Jacobians");
  }
  Stepper stepper(model, path.grid(), Scheme::euler);
  Trajectory tv = make_trajectory(model, path, k0, k1, Scheme::euler);
  const std::size_t d = model.d();
  const std::size_t m = model.m();
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> v(v0.begin(), v0.end());
  std::copy(v.begin(), v.end(), tv.states.begin());
  std::vector<double> dws;
  for (std::int64_t start = k0; start < k1; start += kBlock) {
    const std::int64_t count = std::min(kBlock, k1 - start);
    dws.resize(static_cast<std::size_t>(count) * m);
    path.increments(start, count, dws);
    for (std::int64_t i = 0; i < count; ++i) {
      stepper.step_tangent(start + i, x, v,
                           std::span<const double>(dws).subspan(static_cast<std::size_t>(i) * m, m));
      std::copy(v.begin(), v.end(),
                tv.states.begin() + static_cast<std::ptrdiff_t>((start + i + 1 - k0) * static_cast<std::int64_t>(d)));
    }
  }
  return tv;
}

CsvTable trajectory_csv(const Trajectory& trajectory) {
  std::vector<std::string> header{"t"};
  for (int i = 1; i <= trajectory.dim; ++i) header.push_back("x" + std::to_string(i));
  CsvTable table(std::move(header));
  std::vector<double> row(static_cast<std::size_t>(trajectory.dim) + 1);
  for (std::size_t n = 0; n < trajectory.nodes(); ++n) {
    row[0] = trajectory.grid.time(trajectory.k0 + static_cast<std::int64_t>(n));
    const auto s = trajectory.at(n);
    std::copy(s.begin(), s.end(), row.begin() + 1);
    table.add_numeric_row(row);
  }
  return table;
}

}  // namespace rpsde
