#include "rpsde/pullback.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rpsde/error.hpp"
#include "rpsde/stats.hpp"

namespace rpsde {

namespace {

double sup_gap(std::span<const double> a, std::span<const double> b, std::size_t dim) {
  double worst = 0.0;
  for (std::size_t n = 0; n < a.size() / dim; ++n) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double diff = a[n * dim + i] - b[n * dim + i];
      s += diff * diff;
    }
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

RandomPeriodicPath wrap_window(const SdeModel& model, const NoisePath& path,
                               std::int64_t k_star, Trajectory window,
                               std::span<const double> x0, Scheme scheme) {
  RandomPeriodicPath s;
  s.grid = path.grid();
  s.k_star = k_star;
  s.dim = model.state_dim;
  s.states = std::move(window.states);
  s.x0.assign(x0.begin(), x0.end());
  s.scheme = scheme;
  s.path_id = path.id();
  s.model_id = model.id;
  return s;
}

}  // namespace

Trajectory pullback_window(const SdeModel& model, const NoisePath& path, std::int64_t k_star,
                           int depth, std::span<const double> x0, Scheme scheme) {
  if (depth < 1) throw InvalidArgument("pullback depth must be at least 1");
  const std::int64_t n = path.grid().steps_per_period();
  const std::int64_t k_start = k_star - static_cast<std::int64_t>(depth) * n;
  const auto x_star = integrate_final(model, path, k_start, k_star, x0, scheme);
  Trajectory window = integrate(model, path, k_star, k_star + n, x_star, scheme);
  return window;
}

CauchyReport summarize_gaps(std::vector<int> depths, std::vector<double> gaps) {
  CauchyReport report;
  report.depths = std::move(depths);
  report.gaps = std::move(gaps);
  std::vector<double> xs;
  std::vector<double> ys;
  bool all_small = true;
  for (std::size_t i = 0; i < report.gaps.size(); ++i) {
    if (report.gaps[i] > kGapFloor) {
      all_small = false;
      xs.push_back(static_cast<double>(report.depths[i]));
      ys.push_back(std::log(report.gaps[i]));
    }
  }
  report.fitted_points = xs.size();
  report.trivially_convergent = all_small && !report.gaps.empty();
  if (xs.size() >= 2) {
    report.slope_per_period = fit_line(xs, ys).slope;
    report.pass = report.slope_per_period < 0.0;
  } else {
    report.slope_per_period = std::numeric_limits<double>::quiet_NaN();
    // One usable gap followed by a collapse below the floor still converges.
    report.pass = report.trivially_convergent ||
                  (xs.size() == 1 && !report.gaps.empty() && report.gaps.back() <= kGapFloor);
  }
  return report;
}

PullbackSequence pullback_sequence(const SdeModel& model, const NoisePath& path,
                                   std::int64_t k_star, std::span<const double> x0,
                                   int n_max, Scheme scheme) {
  if (n_max < 2) throw InvalidArgument("pullback sequence needs n_max >= 2 to form a gap");
  PullbackSequence seq;
  std::vector<int> depths;
  std::vector<double> gaps;
  const std::size_t dim = model.d();
  for (int n = 1; n <= n_max; ++n) {
    seq.windows.push_back(pullback_window(model, path, k_star, n, x0, scheme));
    if (n >= 2) {
      depths.push_back(n);
      gaps.push_back(sup_gap(seq.windows[n - 1].states, seq.windows[n - 2].states, dim));
    }
  }
  seq.report = summarize_gaps(std::move(depths), std::move(gaps));
  return seq;
}

RandomPeriodicPath random_periodic_path(const SdeModel& model, const NoisePath& path,
                                        std::int64_t k_star, std::span<const double> x0,
                                        double tol, int n_cap, Scheme scheme) {
  if (!(tol > 0.0)) throw InvalidArgument("pullback tolerance must be strictly positive");
  if (n_cap < 2) throw InvalidArgument("pullback depth cap must be at least 2");
  const std::size_t dim = model.d();
  Trajectory previous = pullback_window(model, path, k_star, 1, x0, scheme);
  std::vector<double> gaps;
  for (int n = 2; n <= n_cap; ++n) {
    Trajectory current = pullback_window(model, path, k_star, n, x0, scheme);
    const double gap = sup_gap(current.states, previous.states, dim);
    gaps.push_back(gap);
    if (gap <= tol) {
      RandomPeriodicPath s = wrap_window(model, path, k_star, std::move(current), x0, scheme);
      s.n_used = n;
      s.last_gap = gap;
      s.tol = tol;
      s.gap_history = std::move(gaps);
      return s;
    }
    previous = std::move(current);
  }
  std::ostringstream os;
  os << "pullback did not reach tolerance " << tol << " within " << n_cap
     << " periods (last gap " << gaps.back() << ")";
  throw NonConvergenceError(os.str(), std::move(gaps));
}

RandomPeriodicPath random_periodic_path_at_depth(const SdeModel& model,
                                                 const NoisePath& path,
                                                 std::int64_t k_star,
                                                 std::span<const double> x0, int depth,
                                                 Scheme scheme) {
  RandomPeriodicPath s = wrap_window(
      model, path, k_star, pullback_window(model, path, k_star, depth, x0, scheme), x0,
      scheme);
  s.n_used = depth;
  s.last_gap = std::numeric_limits<double>::quiet_NaN();
  return s;
}

PeriodicityReport verify_random_periodicity(const SdeModel& model, const NoisePath& path,
                                            const RandomPeriodicPath& s) {
  if (!(s.grid == path.grid())) {
    throw GridMismatchError("random periodic path was built on a different grid");
  }
  if (s.dim != model.state_dim || s.x0.size() != model.d()) {
    throw GridMismatchError("random periodic path dimension differs from the model");
  }
  const std::int64_t n = path.grid().steps_per_period();
  const std::size_t dim = model.d();
  const std::size_t m = model.m();
  const auto next = random_periodic_path_at_depth(model, path, s.k_star + n, s.x0, s.n_used,
                                                  s.scheme);
  const auto shifted = random_periodic_path_at_depth(model, path.shift(n), s.k_star, s.x0,
                                                     s.n_used, s.scheme);

  PeriodicityReport report;
  report.shift_residual = sup_gap(shifted.states, next.states, dim);

  // X(t + tau, t, omega, S(t)) for every node t of the window, reusing one
  // increment block over [t*, t* + 2 tau).
  const auto dws = path.increments(s.k_star, 2 * n);
  Stepper stepper(model, path.grid(), s.scheme);
  std::vector<double> x(dim);
  for (std::int64_t node = 0; node <= n; ++node) {
    const auto start = s.at(static_cast<std::size_t>(node));
    std::copy(start.begin(), start.end(), x.begin());
    stepper.advance(s.k_star + node, n, x,
                    std::span<const double>(dws).subspan(static_cast<std::size_t>(node) * m,
                                                         static_cast<std::size_t>(n) * m));
    const auto target = next.at(static_cast<std::size_t>(node));
    double d2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) d2 += (x[i] - target[i]) * (x[i] - target[i]);
    report.flow_residual = std::max(report.flow_residual, std::sqrt(d2));
  }
  report.flow_tolerance = 10.0 * s.tol;
  report.flow_pass = report.flow_residual <= report.flow_tolerance;
  report.shift_pass = report.shift_residual == 0.0;
  report.pass = report.flow_pass && report.shift_pass;
  return report;
}

double initial_point_gap(const SdeModel& model, const NoisePath& path, std::int64_t k_star,
                         std::span<const double> x0, std::span<const double> x1, int depth,
                         Scheme scheme) {
  const auto a = pullback_window(model, path, k_star, depth, x0, scheme);
  const auto b = pullback_window(model, path, k_star, depth, x1, scheme);
  return sup_gap(a.states, b.states, model.d());
}

CsvTable random_periodic_path_csv(const RandomPeriodicPath& s) {
  std::vector<std::string> header{"phase_t"};
  for (int i = 1; i <= s.dim; ++i) header.push_back("x" + std::to_string(i));
  CsvTable table(std::move(header));
  std::vector<double> row(static_cast<std::size_t>(s.dim) + 1);
  for (std::size_t node = 0; node < s.nodes(); ++node) {
    row[0] = s.grid.time(s.k_star + static_cast<std::int64_t>(node));
    const auto v = s.at(node);
    std::copy(v.begin(), v.end(), row.begin() + 1);
    table.add_numeric_row(row);
  }
  return table;
}

CsvTable cauchy_report_csv(const CauchyReport& report) {
  CsvTable table({"n", "gap"});
  for (std::size_t i = 0; i < report.gaps.size(); ++i) {
    table.add_row({std::to_string(report.depths[i]), format_real(report.gaps[i])});
  }
  return table;
}

}  // namespace rpsde
