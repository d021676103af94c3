#include "rpsde/measures.hpp"

#include <algorithm>
#include <cmath>

#include "rpsde/error.hpp"
#include "rpsde/philox.hpp"
#include "rpsde/pullback.hpp"

namespace rpsde {

namespace {

std::vector<double> start_point(const SdeModel& model, const PullbackParams& params) {
  if (params.x0.empty()) return std::vector<double>(model.d(), 0.0);
  if (params.x0.size() != model.d()) {
    throw InvalidArgument("pullback start point has the wrong dimension");
  }
  return params.x0;
}

void check_phase(const GridSpec& grid, std::int64_t s_index) {
  if (s_index < 0 || s_index >= grid.steps_per_period()) {
    throw InvalidArgument("phase index must lie in [0, steps_per_period)");
  }
}

// S at node k_star for replicas [first, first + n); noise optionally shifted.
std::vector<double> pullback_values(const SdeModel& model, const GridSpec& grid,
                                    std::uint64_t master_seed, std::int64_t k_star,
                                    std::size_t n, std::uint64_t first,
                                    std::int64_t path_shift, const PullbackParams& params,
                                    const RunOptions& options) {
  if (n == 0) throw EmptyEnsembleError("measure needs at least one replica");
  const auto x0 = start_point(model, params);
  const std::size_t d = model.d();
  std::vector<double> out(n * d);
  parallel_for(n, options.workers, [&](std::size_t i) {
    NoisePath path(replica_seed(master_seed, first + i), model.noise_dim, grid);
    if (path_shift != 0) path = path.shift(path_shift);
    const auto s =
        random_periodic_path(model, path, k_star, x0, params.tol, params.n_cap, params.scheme);
    const auto v = s.at(0);
    std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(i * d));
  });
  return out;
}

EmpiricalMeasure wrap(const SdeModel& model, const GridSpec& grid, std::int64_t s_index,
                      std::vector<double> samples, std::uint64_t master_seed,
                      std::uint64_t first) {
  EmpiricalMeasure mu;
  mu.phase = grid.time(s_index);
  mu.phase_index = s_index;
  mu.dim = model.state_dim;
  mu.samples = std::move(samples);
  mu.master_seed = master_seed;
  mu.first_replica = first;
  mu.model_id = model.id;
  return mu;
}

}  // namespace

EmpiricalMeasure sample_periodic_measure(const SdeModel& model, const GridSpec& grid,
                                         std::uint64_t master_seed, std::int64_t s_index,
                                         std::size_t n, const PullbackParams& params,
                                         const RunOptions& options,
                                         std::uint64_t first_replica) {
  check_phase(grid, s_index);
  auto samples = pullback_values(model, grid, master_seed, s_index, n, first_replica, 0,
                                 params, options);
  return wrap(model, grid, s_index, std::move(samples), master_seed, first_replica);
}

std::vector<EmpiricalMeasure> sample_periodic_measures(
    const SdeModel& model, const GridSpec& grid, std::uint64_t master_seed,
    std::span<const std::int64_t> phase_indices, std::size_t n,
    const PullbackParams& params, const RunOptions& options) {
  if (n == 0) throw EmptyEnsembleError("measure needs at least one replica");
  for (auto s : phase_indices) check_phase(grid, s);
  const auto x0 = start_point(model, params);
  const std::size_t d = model.d();
  const std::size_t phases = phase_indices.size();
  std::vector<std::vector<double>> samples(phases, std::vector<double>(n * d));
  parallel_for(n, options.workers, [&](std::size_t i) {
    const NoisePath path(replica_seed(master_seed, i), model.noise_dim, grid);
    const auto s = random_periodic_path(model, path, 0, x0, params.tol, params.n_cap,
                                        params.scheme);
    for (std::size_t q = 0; q < phases; ++q) {
      const auto v = s.at(static_cast<std::size_t>(phase_indices[q]));
      std::copy(v.begin(), v.end(), samples[q].begin() + static_cast<std::ptrdiff_t>(i * d));
    }
  });
  std::vector<EmpiricalMeasure> out;
  out.reserve(phases);
  for (std::size_t q = 0; q < phases; ++q) {
    out.push_back(wrap(model, grid, phase_indices[q], std::move(samples[q]), master_seed, 0));
  }
  return out;
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptyEnsembleError("W1 needs non-empty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  if (n == m) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(x[i] - y[i]);
    return s / static_cast<double>(n);
  }
  // Quantile functions are steps at i/n and j/m; walk the merged breakpoints
  // comparing (i + 1) m with (j + 1) n in integers.
  double total = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  std::uint64_t prev = 0;  // position in units of 1 / (n m)
  while (i < n && j < m) {
    const std::uint64_t end_x = (i + 1) * m;
    const std::uint64_t end_y = (j + 1) * n;
    const std::uint64_t end = std::min(end_x, end_y);
    total += static_cast<double>(end - prev) * std::abs(x[i] - y[j]);
    prev = end;
    if (end_x == end) ++i;
    if (end_y == end) ++j;
  }
  return total / (static_cast<double>(n) * static_cast<double>(m));
}

double wasserstein1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim != 1 || nu.dim != 1) {
    throw CapabilityError("W1 is implemented for one-dimensional measures only");
  }
  return wasserstein1(std::span<const double>(mu.samples), std::span<const double>(nu.samples));
}

std::string to_string(InvarianceMode mode) {
  return mode == InvarianceMode::shifted_paths ? "shifted_paths" : "independent";
}

InvarianceMode invariance_mode_from_string(const std::string& name) {
  if (name == "shifted_paths") return InvarianceMode::shifted_paths;
  if (name == "independent") return InvarianceMode::independent;
  throw InvalidArgument("unknown invariance mode '" + name +
                        "' (expected shifted_paths or independent)");
}

InvarianceReport check_period_invariance(const SdeModel& model, const GridSpec& grid,
                                         std::uint64_t master_seed, std::int64_t s_index,
                                         std::size_t n, InvarianceMode mode,
                                         const PullbackParams& params,
                                         const RunOptions& options,
                                         std::size_t bootstrap_draws) {
  check_phase(grid, s_index);
  const std::int64_t period = grid.steps_per_period();
  InvarianceReport report;
  report.mode = mode;
  report.n = n;
  if (mode == InvarianceMode::shifted_paths) {
    const auto ahead =
        pullback_values(model, grid, master_seed, s_index + period, n, 0, 0, params, options);
    const auto shifted =
        pullback_values(model, grid, master_seed, s_index, n, 0, period, params, options);
    const std::size_t d = model.d();
    for (std::size_t i = 0; i < n; ++i) {
      bool same = true;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = std::abs(ahead[i * d + j] - shifted[i * d + j]);
        report.max_discrepancy = std::max(report.max_discrepancy, diff);
        same = same && ahead[i * d + j] == shifted[i * d + j];
      }
      if (!same) ++report.mismatched_replicas;
    }
    report.pass = report.mismatched_replicas == 0;
    return report;
  }

  if (model.state_dim != 1) {
    throw CapabilityError("independent invariance check is implemented for d = 1 only");
  }
  if (bootstrap_draws < 2) throw InvalidArgument("bootstrap needs at least two draws");
  const auto here = pullback_values(model, grid, master_seed, s_index, n, 0, 0, params, options);
  const auto next =
      pullback_values(model, grid, master_seed, s_index + period, n, n, 0, params, options);
  report.w1 = wasserstein1(here, next);

  std::vector<double> pooled(here);
  pooled.insert(pooled.end(), next.begin(), next.end());
  const std::uint64_t boot_seed = mix64(master_seed ^ 0xB0075EEDULL);
  std::vector<double> draws(bootstrap_draws);
  parallel_for(bootstrap_draws, options.workers, [&](std::size_t b) {
    std::vector<double> u(n), v(n);
    const auto stream = static_cast<std::uint32_t>(b);
    for (std::size_t i = 0; i < n; ++i) {
      const auto pick = [&](std::uint64_t idx) {
        const double r = keyed_uniform(boot_seed, stream, idx);
        return pooled[std::min(pooled.size() - 1,
                               static_cast<std::size_t>(r * static_cast<double>(pooled.size())))];
      };
      u[i] = pick(2 * i);
      v[i] = pick(2 * i + 1);
    }
    const double w = wasserstein1(u, v);
    draws[b] = w * w;
  });
  double sum = 0.0;
  for (double w2 : draws) sum += w2;
  report.bootstrap_se = std::sqrt(sum / static_cast<double>(bootstrap_draws));
  report.pass = report.w1 <= 3.0 * report.bootstrap_se;
  return report;
}

SupportInterval support_interval(const EmpiricalMeasure& mu, double coverage) {
  if (mu.dim != 1) throw CapabilityError("support interval is implemented for d = 1 only");
  if (mu.samples.empty()) throw EmptyEnsembleError("support interval of an empty measure");
  if (!(coverage > 0.0 && coverage <= 1.0)) {
    throw InvalidArgument("coverage must lie in (0, 1]");
  }
  std::vector<double> sorted(mu.samples);
  std::sort(sorted.begin(), sorted.end());
  const double tail = 0.5 * (1.0 - coverage);
  return {sorted_quantile(sorted, tail), sorted_quantile(sorted, 1.0 - tail)};
}

Estimate measure_probability(const EmpiricalMeasure& mu, const Interval& a) {
  if (mu.dim != 1) throw CapabilityError("interval probabilities need d = 1");
  if (mu.samples.empty()) throw EmptyEnsembleError("probability under an empty measure");
  std::size_t hits = 0;
  for (double x : mu.samples) hits += a.contains(x) ? 1 : 0;
  const double n = static_cast<double>(mu.samples.size());
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

CsvTable measure_csv(std::span<const EmpiricalMeasure> measures) {
  const int dim = measures.empty() ? 1 : measures.front().dim;
  std::vector<std::string> header{"phase", "sample_index"};
  for (int i = 1; i <= dim; ++i) header.push_back("x" + std::to_string(i));
  CsvTable table(std::move(header));
  for (const auto& mu : measures) {
    if (mu.dim != dim) throw InvalidArgument("stacked measures must share a dimension");
    for (std::size_t i = 0; i < mu.count(); ++i) {
      std::vector<std::string> row{format_real(mu.phase), std::to_string(i)};
      for (double v : mu.at(i)) row.push_back(format_real(v));
      table.add_row(std::move(row));
    }
  }
  return table;
}

CsvTable invariance_report_csv(const InvarianceReport& report) {
  CsvTable table({"mode", "n", "max_discrepancy", "mismatched", "w1", "bootstrap_se", "pass"});
  table.add_row({to_string(report.mode), std::to_string(report.n),
                 format_real(report.max_discrepancy), std::to_string(report.mismatched_replicas),
                 format_real(report.w1), format_real(report.bootstrap_se),
                 report.pass ? "1" : "0"});
  return table;
}

}  // namespace rpsde
