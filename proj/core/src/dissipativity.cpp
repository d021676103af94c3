#include "rpsde/dissipativity.hpp"

#include <cmath>
#include <limits>

#include "rpsde/error.hpp"
#include "rpsde/linalg.hpp"
#include "rpsde/philox.hpp"

namespace rpsde {

namespace {

constexpr char kSamplingNote[] =
    "sampled check on a bounded box: a pass is evidence on the sampled points, "
    "not a proof over the whole state space";

}  // namespace

std::vector<double> sample_pairs(const SampleSpec& spec, int dim) {
  if (spec.n_points < 2 || spec.n_times < 1 || !(spec.box_radius > 0.0)) {
    throw InvalidArgument("sample spec needs n_points >= 2, n_times >= 1, radius > 0");
  }
  const auto d = static_cast<std::size_t>(dim);
  const auto n = static_cast<std::size_t>(spec.n_points);
  const double r = spec.box_radius;
  std::vector<double> points(n * d);
  if (dim == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      points[i] = -r + 2.0 * r * static_cast<double>(i) / static_cast<double>(n - 1);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        points[i * d + j] =
            r * (2.0 * keyed_uniform(spec.seed, static_cast<std::uint32_t>(j), i) - 1.0);
      }
    }
  }
  std::vector<double> pairs;
  pairs.reserve((n * (n - 1) / 2 + n * d) * 2 * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      pairs.insert(pairs.end(), points.begin() + static_cast<std::ptrdiff_t>(i * d),
                   points.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
      pairs.insert(pairs.end(), points.begin() + static_cast<std::ptrdiff_t>(j * d),
                   points.begin() + static_cast<std::ptrdiff_t>((j + 1) * d));
    }
  }
  const double eps = spec.near_diagonal * r;
  if (eps > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < d; ++l) {
        const auto first = points.begin() + static_cast<std::ptrdiff_t>(i * d);
        pairs.insert(pairs.end(), first, first + static_cast<std::ptrdiff_t>(d));
        const std::size_t base = pairs.size();
        pairs.insert(pairs.end(), first, first + static_cast<std::ptrdiff_t>(d));
        pairs[base + l] += eps;
      }
    }
  }
  return pairs;
}

double two_point_generator(const SdeModel& model, const LyapunovSpec& lyap, double t,
                           std::span<const double> x, std::span<const double> y) {
  const std::size_t d = model.d();
  const std::size_t m = model.m();
  if (x.size() != d || y.size() != d) {
    throw InvalidArgument("two-point generator arguments have the wrong dimension");
  }
  std::vector<double> diff(d);
  bool equal = true;
  for (std::size_t i = 0; i < d; ++i) {
    diff[i] = x[i] - y[i];
    equal = equal && diff[i] == 0.0;
  }
  if (equal && lyap.p < 2.0) {
    throw SingularityError("two-point generator at x = y needs p >= 2");
  }
  std::vector<double> grad(d), hess(d * d);
  lyap.gradient(t, diff, grad);
  lyap.hessian(t, diff, hess);

  std::vector<double> fx(d), fy(d), sx(d * m), sy(d * m);
  model.drift(t, x, fx);
  model.drift(t, y, fy);
  model.diffusion(t, x, sx);
  model.diffusion(t, y, sy);

  double value = lyap.time_derivative ? lyap.time_derivative(t, diff) : 0.0;
  for (std::size_t i = 0; i < d; ++i) value += grad[i] * (fx[i] - fy[i]);
  double trace = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      const double di = sx[i * m + k] - sy[i * m + k];
      if (di == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        trace += di * hess[i * d + j] * (sx[j * m + k] - sy[j * m + k]);
      }
    }
  }
  return value + 0.5 * trace;
}

GeneratorBoundReport check_generator_bound(const SdeModel& model, const LyapunovSpec& lyap,
                                           const SampleSpec& spec) {
  if (!lyap.lambda_rate) {
    throw InvalidArgument("generator bound check needs lambda_rate attached to the spec");
  }
  const std::size_t d = model.d();
  const auto pairs = sample_pairs(spec, model.state_dim);
  const std::size_t count = pairs.size() / (2 * d);
  GeneratorBoundReport report;
  report.max_margin = -std::numeric_limits<double>::infinity();
  report.note = kSamplingNote;
  std::vector<double> diff(d);
  for (int it = 0; it < spec.n_times; ++it) {
    const double t = model.period * static_cast<double>(it) / static_cast<double>(spec.n_times);
    const double lambda = lyap.lambda_rate(t);
    for (std::size_t q = 0; q < count; ++q) {
      const auto x = std::span<const double>(pairs).subspan(2 * d * q, d);
      const auto y = std::span<const double>(pairs).subspan(2 * d * q + d, d);
      for (std::size_t i = 0; i < d; ++i) diff[i] = x[i] - y[i];
      const double margin =
          two_point_generator(model, lyap, t, x, y) - lambda * lyap.value(t, diff);
      ++report.samples;
      if (margin > report.max_margin) {
        report.max_margin = margin;
        report.worst_t = t;
        report.worst_x.assign(x.begin(), x.end());
        report.worst_y.assign(y.begin(), y.end());
      }
    }
  }
  report.pass = report.max_margin <= 1e-9;
  return report;
}

ConditionReport check_drift_conditions(const SdeModel& model, const SampleSpec& spec,
                                       const RunOptions& options) {
  const std::size_t d = model.d();
  const std::size_t m = model.m();
  const auto pairs = sample_pairs(spec, model.state_dim);
  const std::size_t count = pairs.size() / (2 * d);
  const auto nt = static_cast<std::size_t>(spec.n_times);

  ConditionReport report;
  report.sampling = spec;
  report.note = kSamplingNote;
  report.times.resize(nt + 1);
  report.beta_profile.resize(nt + 1);
  report.lip_profile.resize(nt + 1);
  parallel_for(nt + 1, options.workers, [&](std::size_t it) {
    const double t = model.period * static_cast<double>(it) / static_cast<double>(nt);
    std::vector<double> fx(d), fy(d), sx(d * m), sy(d * m);
    double beta = -std::numeric_limits<double>::infinity();
    double lip = 0.0;
    for (std::size_t q = 0; q < count; ++q) {
      const auto x = std::span<const double>(pairs).subspan(2 * d * q, d);
      const auto y = std::span<const double>(pairs).subspan(2 * d * q + d, d);
      model.drift(t, x, fx);
      model.drift(t, y, fy);
      model.diffusion(t, x, sx);
      model.diffusion(t, y, sy);
      double inner = 0.0;
      double dist2 = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        inner += (fx[i] - fy[i]) * (x[i] - y[i]);
        dist2 += (x[i] - y[i]) * (x[i] - y[i]);
      }
      if (dist2 == 0.0) continue;
      beta = std::max(beta, inner / dist2);
      for (std::size_t k = 0; k < m; ++k) {
        double col2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          const double di = sx[i * m + k] - sy[i * m + k];
          col2 += di * di;
        }
        lip = std::max(lip, std::sqrt(col2 / dist2));
      }
    }
    report.times[it] = t;
    report.beta_profile[it] = beta;
    report.lip_profile[it] = lip;
  });
  const double h = model.period / static_cast<double>(nt);
  double integral = 0.0;
  for (std::size_t it = 0; it < nt; ++it) {
    integral += 0.5 * h * (report.beta_profile[it] + report.beta_profile[it + 1]);
  }
  report.integral_beta = integral;
  report.pass = integral < 0.0;
  return report;
}

std::function<double(double)> lambda_from_conditions(const ConditionReport& report,
                                                     double period, double p, int noise_dim) {
  if (report.times.size() < 2) throw InvalidArgument("condition report has no profile");
  std::vector<double> lambda(report.times.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double l = report.lip_profile[i];
    lambda[i] = p * report.beta_profile[i] +
                p * (p - 1.0) / 2.0 * static_cast<double>(noise_dim) * l * l;
  }
  const std::size_t nt = lambda.size() - 1;
  return [lambda, period, nt](double t) {
    double phase = std::fmod(t, period);
    if (phase < 0.0) phase += period;
    const double pos = phase / period * static_cast<double>(nt);
    const auto i = std::min(static_cast<std::size_t>(pos), nt - 1);
    const double frac = pos - static_cast<double>(i);
    if (frac == 0.0) return lambda[i];
    return lambda[i] + frac * (lambda[i + 1] - lambda[i]);
  };
}

ContractionReport contraction_report(const SdeModel& model, const NoisePath& path,
                                     std::int64_t k0, int periods,
                                     std::span<const double> x0,
                                     std::span<const double> y0, Scheme scheme) {
  check_compatible(model, path);
  if (periods < 1) throw InvalidArgument("contraction report needs at least one period");
  if (x0.size() != model.d() || y0.size() != model.d()) {
    throw InvalidArgument("initial states have the wrong dimension");
  }
  const std::size_t d = model.d();
  const std::size_t m = model.m();
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> y(y0.begin(), y0.end());
  auto log_gap = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return s == 0.0 ? -std::numeric_limits<double>::infinity() : 0.5 * std::log(s);
  };
  if (std::isinf(log_gap())) throw InvalidArgument("contraction report needs x0 != y0");

  ContractionReport report;
  const GridSpec& grid = path.grid();
  const std::int64_t n = grid.steps_per_period();
  Stepper sx(model, grid, scheme);
  Stepper sy(model, grid, scheme);
  report.times.push_back(grid.time(k0));
  report.log_gaps.push_back(log_gap());
  constexpr std::int64_t kBlock = 4096;
  std::vector<double> dws;
  for (int j = 0; j < periods && !report.truncated; ++j) {
    const std::int64_t start = k0 + j * n;
    for (std::int64_t b = start; b < start + n; b += kBlock) {
      const std::int64_t count = std::min(kBlock, start + n - b);
      dws.resize(static_cast<std::size_t>(count) * m);
      path.increments(b, count, dws);
      sx.advance(b, count, x, dws);
      sy.advance(b, count, y, dws);
    }
    const double lg = log_gap();
    if (std::isinf(lg)) {
      report.truncated = true;
    } else {
      report.times.push_back(grid.time(start + n));
      report.log_gaps.push_back(lg);
    }
  }
  report.slope = report.times.size() >= 2
                     ? fit_line(report.times, report.log_gaps).slope
                     : std::numeric_limits<double>::quiet_NaN();
  report.implied_exponent = report.slope;
  return report;
}

Estimate tempered_running_max(const SdeModel& model, const GridSpec& grid,
                              std::uint64_t master_seed, std::size_t replicas,
                              std::int64_t k0, std::int64_t horizon_steps,
                              std::span<const double> x, const LyapunovSpec& lyap,
                              const RunOptions& options) {
  if (horizon_steps < 1) throw InvalidArgument("horizon must be at least one step");
  const auto paths = ensemble(master_seed, replicas, model.noise_dim, grid);
  const std::size_t d = model.d();
  const std::size_t m = model.m();
  std::vector<double> values(replicas);
  parallel_for(replicas, options.workers, [&](std::size_t r) {
    Stepper stepper(model, grid, Scheme::euler);
    std::vector<double> state(x.begin(), x.end());
    std::vector<double> diff(d);
    const auto dws = paths[r].increments(k0, horizon_steps);
    const double t0 = grid.time(k0);
    double best = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < horizon_steps; ++i) {
      stepper.step(k0 + i, state, std::span<const double>(dws).subspan(static_cast<std::size_t>(i) * m, m));
      for (std::size_t j = 0; j < d; ++j) diff[j] = state[j] - x[j];
      best = std::max(best, std::log(lyap.value(t0, diff)));
    }
    values[r] = best;
  });
  return mean_estimate(values);
}

CsvTable condition_report_csv(const ConditionReport& report) {
  CsvTable table({"t", "beta", "L"});
  for (std::size_t i = 0; i < report.times.size(); ++i) {
    const double row[] = {report.times[i], report.beta_profile[i], report.lip_profile[i]};
    table.add_numeric_row(row);
  }
  return table;
}

CsvTable contraction_report_csv(const ContractionReport& report) {
  CsvTable table({"t", "log_gap"});
  for (std::size_t i = 0; i < report.times.size(); ++i) {
    const double row[] = {report.times[i], report.log_gaps[i]};
    table.add_numeric_row(row);
  }
  return table;
}

}  // namespace rpsde
