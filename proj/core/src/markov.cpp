#include "rpsde/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rpsde/error.hpp"

namespace rpsde {

namespace {

constexpr std::int64_t kBlock = 4096;

// Advances x over [k0, k0 + count) drawing increments in blocks.
void run(Stepper& stepper, const NoisePath& path, std::int64_t k0, std::int64_t count,
         std::span<double> x, std::vector<double>& buf) {
  const auto m = static_cast<std::size_t>(path.dim());
  for (std::int64_t b = k0; b < k0 + count; b += kBlock) {
    const std::int64_t len = std::min(kBlock, k0 + count - b);
    buf.resize(static_cast<std::size_t>(len) * m);
    path.increments(b, len, buf);
    stepper.advance(b, len, x, buf);
  }
}

void require_scalar(const SdeModel& model, const char* what) {
  if (model.state_dim != 1) {
    throw CapabilityError(std::string(what) + " is implemented for scalar models only");
  }
}

void check_vector(const SdeModel& model, std::span<const double> x, const char* what) {
  if (x.size() != model.d()) throw InvalidArgument(std::string(what) + " has the wrong dimension");
}

std::vector<double> binomial_row(std::size_t hits, std::size_t n) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

}  // namespace

TestFunction make_test_function(const std::string& name, std::span<const double> params) {
  const auto need = [&](std::size_t count) {
    if (params.size() != count) {
      throw InvalidArgument("test function '" + name + "' takes " + std::to_string(count) +
                            " parameters");
    }
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (name == "identity") {
    need(0);
    return {name, [](double x) { return x; }, inf};
  }
  if (name == "square") {
    need(0);
    return {name, [](double x) { return x * x; }, inf};
  }
  if (name == "one") {
    need(0);
    return {name, [](double) { return 1.0; }, 1.0};
  }
  if (name == "tanh") {
    need(0);
    return {name, [](double x) { return std::tanh(x); }, 1.0};
  }
  if (name == "clamp") {
    need(2);
    const double lo = params[0];
    const double hi = params[1];
    if (!(lo <= hi)) throw InvalidArgument("clamp needs lo <= hi");
    return {name, [lo, hi](double x) { return std::clamp(x, lo, hi); },
            std::max(std::abs(lo), std::abs(hi))};
  }
  if (name == "indicator") {
    need(2);
    const Interval a{params[0], params[1]};
    return {name, [a](double x) { return a.contains(x) ? 1.0 : 0.0; }, 1.0};
  }
  if (name == "mollified_indicator") {
    need(3);
    const double lo = params[0];
    const double hi = params[1];
    const double w = params[2];
    if (!(w > 0.0) || !(lo < hi)) {
      throw InvalidArgument("mollified indicator needs lo < hi and a positive width");
    }
    return {name,
            [lo, hi, w](double x) {
              return std::clamp(std::min(x - lo, hi - x) / w + 0.5, 0.0, 1.0);
            },
            1.0};
  }
  throw InvalidArgument("unknown test function '" + name +
                        "' (expected identity, square, one, tanh, clamp, indicator, "
                        "mollified_indicator)");
}

Estimate expectation(const EmpiricalMeasure& mu, const TestFunction& h) {
  if (mu.dim != 1) throw CapabilityError("scalar test functions need d = 1");
  if (mu.samples.empty()) throw EmptyEnsembleError("expectation under an empty measure");
  std::vector<double> values(mu.samples.size());
  std::transform(mu.samples.begin(), mu.samples.end(), values.begin(),
                 [&](double x) { return h(x); });
  return mean_estimate(values);
}

ProbabilityEstimate transition_probability(const SdeModel& model, const GridSpec& grid,
                                           std::uint64_t master_seed, std::int64_t s_index,
                                           double x, std::int64_t horizon_steps,
                                           const Interval& a, std::size_t n,
                                           const RunOptions& options) {
  require_scalar(model, "transition_probability");
  if (horizon_steps < 1) throw InvalidArgument("transition horizon must be at least one step");
  if (n < 100) throw InvalidArgument("transition_probability needs at least 100 replicas");
  std::vector<std::uint8_t> inside(n);
  parallel_for(n, options.workers, [&](std::size_t i) {
    const NoisePath path(replica_seed(master_seed, i), model.noise_dim, grid);
    Stepper stepper(model, grid, Scheme::euler);
    std::vector<double> state{x};
    std::vector<double> buf;
    run(stepper, path, s_index, horizon_steps, state, buf);
    inside[i] = a.contains(state[0]) ? 1 : 0;
  });
  ProbabilityEstimate out;
  out.n = n;
  for (auto b : inside) out.hits += b;
  const auto row = binomial_row(out.hits, n);
  out.value = row[0];
  out.se = row[1];
  return out;
}

KbReport kb_average(const SdeModel& model, const GridSpec& grid, std::uint64_t master_seed,
                    std::int64_t s_index, double x, std::int64_t t_index, const Interval& a,
                    int n_periods, std::size_t n_mc, std::optional<Estimate> reference,
                    const RunOptions& options) {
  require_scalar(model, "kb_average");
  const std::int64_t period = grid.steps_per_period();
  if (t_index < s_index || t_index >= s_index + period) {
    throw InvalidArgument("kb_average needs s <= t < s + tau");
  }
  if (n_periods < 1) throw InvalidArgument("kb_average needs at least one period");
  if (n_mc < 2) throw InvalidArgument("kb_average needs at least two replicas");
  const auto np = static_cast<std::size_t>(n_periods);
  std::vector<std::uint8_t> inside(n_mc * np);
  parallel_for(n_mc, options.workers, [&](std::size_t i) {
    const NoisePath path(replica_seed(master_seed, i), model.noise_dim, grid);
    Stepper stepper(model, grid, Scheme::euler);
    std::vector<double> state{x};
    std::vector<double> buf;
    std::int64_t k = s_index;
    for (std::size_t q = 0; q < np; ++q) {
      const std::int64_t target = t_index + static_cast<std::int64_t>(q + 1) * period;
      run(stepper, path, k, target - k, state, buf);
      k = target;
      inside[i * np + q] = a.contains(state[0]) ? 1 : 0;
    }
  });

  KbReport report;
  report.replicas = n_mc;
  report.hits.assign(np, 0);
  std::vector<double> replica_means(n_mc);
  std::size_t total = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    std::size_t own = 0;
    for (std::size_t q = 0; q < np; ++q) {
      own += inside[i * np + q];
      report.hits[q] += inside[i * np + q];
    }
    total += own;
    replica_means[i] = static_cast<double>(own) / static_cast<double>(np);
  }
  for (std::size_t q = 0; q < np; ++q) {
    const auto row = binomial_row(report.hits[q], n_mc);
    report.per_n.push_back(row[0]);
    report.per_n_se.push_back(row[1]);
  }
  report.average = static_cast<double>(total) / (static_cast<double>(np) * static_cast<double>(n_mc));
  report.se = std::sqrt(sample_variance(replica_means) / static_cast<double>(n_mc));
  report.reference = reference;
  if (reference) {
    report.difference = std::abs(report.average - reference->value);
    report.combined_se = std::hypot(report.se, reference->se);
    report.pass = report.difference <= 3.0 * report.combined_se;
  } else {
    report.combined_se = report.se;
    report.pass = true;
  }
  return report;
}

ErgodicReport ergodic_time_average(const SdeModel& model, const NoisePath& path,
                                   std::int64_t s_index, double x, const TestFunction& h,
                                   int n_periods, std::optional<Estimate> reference) {
  require_scalar(model, "ergodic_time_average");
  check_compatible(model, path);
  if (n_periods < 10) throw InvalidArgument("ergodic_time_average needs at least 10 periods");
  const GridSpec& grid = path.grid();
  const std::int64_t period = grid.steps_per_period();
  Stepper stepper(model, grid, Scheme::euler);
  std::vector<double> state{x};
  std::vector<double> buf;
  std::vector<double> values(static_cast<std::size_t>(n_periods));
  for (int q = 0; q < n_periods; ++q) {
    run(stepper, path, s_index + q * period, period, state, buf);
    values[static_cast<std::size_t>(q)] = h(state[0]);
  }
  ErgodicReport report;
  report.periods = values.size();
  report.time_average = batch_means(values);
  report.reference = reference;
  if (reference) {
    report.difference = std::abs(report.time_average.value - reference->value);
    report.combined_se = std::hypot(report.time_average.se, reference->se);
    report.pass = report.difference <= 3.0 * report.combined_se;
  } else {
    report.combined_se = report.time_average.se;
    report.pass = true;
  }
  return report;
}

MixingReport mixing_report(const SdeModel& model, const GridSpec& grid,
                           std::uint64_t master_seed, std::int64_t s_index, double x, double y,
                           const TestFunction& h, std::span<const int> n_list, std::size_t n,
                           const LyapunovSpec& lyap, const EmpiricalMeasure* reference,
                           const RunOptions& options) {
  require_scalar(model, "mixing_report");
  if (!lyap.lambda_rate) throw InvalidArgument("mixing_report needs lambda_rate attached");
  if (!std::isfinite(h.sup_norm)) throw InvalidArgument("mixing_report needs a bounded h");
  if (n_list.empty() || n < 2) throw InvalidArgument("mixing_report needs n values and replicas");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1])) {
      throw InvalidArgument("n_list must be strictly increasing positive period counts");
    }
  }
  const std::size_t nn = n_list.size();
  const std::int64_t period = grid.steps_per_period();
  std::vector<double> hx(n * nn), hy(n * nn);
  parallel_for(n, options.workers, [&](std::size_t i) {
    const NoisePath path(replica_seed(master_seed, i), model.noise_dim, grid);
    Stepper sx(model, grid, Scheme::euler);
    Stepper sy(model, grid, Scheme::euler);
    std::vector<double> a{x}, b{y}, buf;
    std::int64_t k = s_index;
    for (std::size_t q = 0; q < nn; ++q) {
      const std::int64_t target = s_index + n_list[q] * period;
      run(sx, path, k, target - k, a, buf);
      run(sy, path, k, target - k, b, buf);
      k = target;
      hx[i * nn + q] = h(a[0]);
      hy[i * nn + q] = h(b[0]);
    }
  });

  MixingReport report;
  report.n_values.assign(n_list.begin(), n_list.end());
  const Estimate target = reference ? expectation(*reference, h) : Estimate{};
  std::vector<double> diff(n), own(n);
  for (std::size_t q = 0; q < nn; ++q) {
    for (std::size_t i = 0; i < n; ++i) {
      diff[i] = hx[i * nn + q] - hy[i * nn + q];
      own[i] = hx[i * nn + q];
    }
    const Estimate e = mean_estimate(diff);
    report.pair_estimates.push_back(std::abs(e.value));
    report.pair_se.push_back(e.se);
    if (reference) {
      const Estimate m = mean_estimate(own);
      report.measure_estimates.push_back(std::abs(m.value - target.value));
      report.measure_se.push_back(std::hypot(m.se, target.se));
    }
  }

  const double lambda_integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      lyap.lambda_rate, 0.0, model.period, 15, 1e-12);
  report.bound = std::exp(lambda_integral / lyap.p);

  std::vector<double> xs, ys, sds;
  for (std::size_t q = 0; q < nn; ++q) {
    if (report.pair_estimates[q] > 0.0 && report.pair_se[q] > 0.0) {
      xs.push_back(report.n_values[q]);
      ys.push_back(std::log(report.pair_estimates[q]));
      sds.push_back(report.pair_se[q] / report.pair_estimates[q]);
    }
  }
  if (xs.size() >= 2) {
    const LineFit fit = fit_line_weighted(xs, ys, sds);
    report.has_fit = true;
    report.fitted_ratio = std::exp(fit.slope);
    report.ratio_se = report.fitted_ratio * fit.slope_se;
    report.pass = report.fitted_ratio <= report.bound + 3.0 * report.ratio_se;
  } else {
    // Nothing to falsify without a fit; point estimates are still reported.
    report.pass = true;
  }
  if (reference) {
    xs.clear();
    ys.clear();
    for (std::size_t q = 0; q < nn; ++q) {
      if (report.measure_estimates[q] > 0.0) {
        xs.push_back(report.n_values[q]);
        ys.push_back(std::log(report.measure_estimates[q]));
      }
    }
    report.measure_ratio = xs.size() >= 2 ? std::exp(fit_line(xs, ys).slope)
                                          : std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

std::vector<double> bel_samples(const SdeModel& model, const GridSpec& grid,
                                std::uint64_t master_seed, std::int64_t s_index,
                                std::span<const double> x, std::span<const double> v,
                                const TestFunction& h, std::int64_t horizon_steps,
                                std::size_t n, const RunOptions& options) {
  require_scalar(model, "bel_gradient");
  check_vector(model, x, "start point");
  check_vector(model, v, "direction");
  if (!model.diffusion_right_inverse) {
    throw CapabilityError("bel_gradient needs a diffusion right inverse");
  }
  if (!model.drift_jacobian || !model.diffusion_jacobians) {
    throw CapabilityError("bel_gradient needs drift and diffusion Jacobians");
  }
  if (horizon_steps < 1) throw InvalidArgument("bel horizon must be at least one step");
  if (n == 0) throw EmptyEnsembleError("bel_gradient needs at least one replica");
  const std::size_t d = model.d();
  const std::size_t m = model.m();
  const double horizon = static_cast<double>(horizon_steps) * grid.dt();
  std::vector<double> out(n);
  parallel_for(n, options.workers, [&](std::size_t r) {
    const NoisePath path(replica_seed(master_seed, r), model.noise_dim, grid);
    Stepper stepper(model, grid, Scheme::euler);
    std::vector<double> state(x.begin(), x.end());
    std::vector<double> tangent(v.begin(), v.end());
    std::vector<double> inv(m * d);
    std::vector<double> dws;
    double integral = 0.0;
    const std::int64_t end = s_index + horizon_steps;
    for (std::int64_t b = s_index; b < end; b += kBlock) {
      const std::int64_t len = std::min(kBlock, end - b);
      dws.resize(static_cast<std::size_t>(len) * m);
      path.increments(b, len, dws);
      for (std::int64_t i = 0; i < len; ++i) {
        const auto dw = std::span<const double>(dws).subspan(static_cast<std::size_t>(i) * m, m);
        (*model.diffusion_right_inverse)(grid.phase_time(b + i), state, inv);
        for (std::size_t k = 0; k < m; ++k) {
          double w = 0.0;
          for (std::size_t j = 0; j < d; ++j) w += inv[k * d + j] * tangent[j];
          integral += w * dw[k];
        }
        stepper.step_tangent(b + i, state, tangent, dw);
      }
    }
    out[r] = h(state[0]) * integral / horizon;
  });
  return out;
}

Estimate bel_gradient(const SdeModel& model, const GridSpec& grid, std::uint64_t master_seed,
                      std::int64_t s_index, std::span<const double> x,
                      std::span<const double> v, const TestFunction& h,
                      std::int64_t horizon_steps, std::size_t n, const RunOptions& options) {
  const auto samples =
      bel_samples(model, grid, master_seed, s_index, x, v, h, horizon_steps, n, options);
  return mean_estimate(samples);
}

Estimate finite_difference_gradient(const SdeModel& model, const GridSpec& grid,
                                    std::uint64_t master_seed, std::int64_t s_index,
                                    std::span<const double> x, std::span<const double> v,
                                    const TestFunction& h, std::int64_t horizon_steps,
                                    std::size_t n, double eps, const RunOptions& options) {
  require_scalar(model, "finite_difference_gradient");
  check_vector(model, x, "start point");
  check_vector(model, v, "direction");
  if (!(eps > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  if (horizon_steps < 1) throw InvalidArgument("horizon must be at least one step");
  if (n == 0) throw EmptyEnsembleError("finite difference needs at least one replica");
  std::vector<double> out(n);
  parallel_for(n, options.workers, [&](std::size_t r) {
    const NoisePath path(replica_seed(master_seed, r), model.noise_dim, grid);
    Stepper sa(model, grid, Scheme::euler);
    Stepper sb(model, grid, Scheme::euler);
    std::vector<double> a(x.begin(), x.end());
    std::vector<double> b(x.begin(), x.end());
    for (std::size_t j = 0; j < b.size(); ++j) b[j] += eps * v[j];
    std::vector<double> buf;
    run(sa, path, s_index, horizon_steps, a, buf);
    run(sb, path, s_index, horizon_steps, b, buf);
    out[r] = (h(b[0]) - h(a[0])) / eps;
  });
  return mean_estimate(out);
}

CsvTable kb_report_csv(const KbReport& report) {
  CsvTable table({"n", "estimate", "se"});
  for (std::size_t q = 0; q < report.per_n.size(); ++q) {
    table.add_row({std::to_string(q + 1), format_real(report.per_n[q]),
                   format_real(report.per_n_se[q])});
  }
  return table;
}

CsvTable mixing_report_csv(const MixingReport& report) {
  CsvTable table({"n", "estimate", "se"});
  for (std::size_t q = 0; q < report.n_values.size(); ++q) {
    table.add_row({std::to_string(report.n_values[q]), format_real(report.pair_estimates[q]),
                   format_real(report.pair_se[q])});
  }
  return table;
}

CsvTable ergodic_report_csv(const ErgodicReport& report) {
  CsvTable table({"n", "estimate", "se"});
  table.add_row({std::to_string(report.periods), format_real(report.time_average.value),
                 format_real(report.time_average.se)});
  return table;
}

}  // namespace rpsde
