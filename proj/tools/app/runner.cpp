#include "app/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include "app/manifest.hpp"
#include "app/plot.hpp"
#include "rpsde/dissipativity.hpp"
#include "rpsde/integrate.hpp"
#include "rpsde/markov.hpp"
#include "rpsde/measures.hpp"
#include "rpsde/pullback.hpp"
#include "rpsde/stats.hpp"

#ifndef RPSDE_VERSION
#define RPSDE_VERSION "0.0.0"
#endif

namespace rpsde::app {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string flag(bool b) { return b ? "1" : "0"; }

// `quantity,value` table written by every command.
class Summary {
 public:
  void add(const std::string& name, double v) { rows_.push_back({name, format_real(v)}); }
  void add(const std::string& name, std::int64_t v) { rows_.push_back({name, std::to_string(v)}); }
  void add(const std::string& name, std::size_t v) { rows_.push_back({name, std::to_string(v)}); }
  void add_flag(const std::string& name, bool v) { rows_.push_back({name, flag(v)}); }
  void add_text(const std::string& name, const std::string& v) { rows_.push_back({name, v}); }
  CsvTable table() const {
    CsvTable t({"quantity", "value"});
    for (const auto& r : rows_) t.add_row(r);
    return t;
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

struct Context {
  const ExperimentConfig& config;
  const SdeModel& model;
  const GridSpec& grid;
  std::uint64_t seed;
  RunOptions options;
  std::filesystem::path out_dir;
  bool plots;
  std::ostream& log;
  RunResult result;
  Summary summary;

  void write(const std::string& name, const CsvTable& table) {
    const auto file = out_dir / name;
    table.write(file);
    result.outputs.push_back(name);
    if (plots) {
      try {
        result.outputs.push_back(emit_plot(file).filename().string());
      } catch (const SchemaError&) {
        // Tables without a plot kind (summaries, per-replica listings).
      }
    }
  }
  void verdict(bool pass) {
    if (!pass) result.status = kExitCheckFailed;
  }
};

std::vector<double> state_or(const ExperimentConfig& config, const std::string& section,
                             const std::string& key, const SdeModel& model, double fill) {
  auto v = config.reals(section, key);
  if (v.empty()) v.assign(model.d(), fill);
  return v;
}

Scheme scheme_of(const ExperimentConfig& config, const std::string& section) {
  return scheme_from_string(config.text(section, "scheme"));
}

TestFunction test_function_of(const ExperimentConfig& config, const std::string& section) {
  return make_test_function(config.text(section, "h"), config.reals(section, "h_params"));
}

SampleSpec sample_spec_of(const ExperimentConfig& config) {
  SampleSpec spec;
  spec.box_radius = config.real("check", "box_radius");
  spec.n_times = static_cast<int>(config.integer("check", "n_times"));
  spec.n_points = static_cast<int>(config.integer("check", "n_points"));
  spec.near_diagonal = config.real("check", "near_diagonal");
  spec.seed = std::stoull(config.text("check", "sample_seed"));
  return spec;
}

std::size_t count_of(const ExperimentConfig& config, const std::string& section,
                     const std::string& key) {
  return static_cast<std::size_t>(config.integer(section, key));
}

void simulate(Context& c) {
  const NoisePath path(c.seed, c.model.noise_dim, c.grid);
  const auto x0 = state_or(c.config, "simulate", "x0", c.model, 0.0);
  const auto k0 = c.config.integer("simulate", "start_index");
  const auto k1 = k0 + c.config.integer("simulate", "periods") * c.grid.steps_per_period();
  const auto traj = integrate(c.model, path, k0, k1, x0, scheme_of(c.config, "simulate"));
  c.write("trajectory.csv", trajectory_csv(traj));
  const auto last = traj.final_state();
  for (std::size_t i = 0; i < last.size(); ++i) {
    c.summary.add("final_x" + std::to_string(i + 1), last[i]);
  }
}

void pullback(Context& c) {
  const NoisePath path(c.seed, c.model.noise_dim, c.grid);
  const auto x0 = state_or(c.config, "pullback", "x0", c.model, 0.0);
  const auto k = c.config.integer("pullback", "phase_index");
  const auto scheme = scheme_of(c.config, "pullback");
  const auto seq = pullback_sequence(c.model, path, k, x0,
                                     static_cast<int>(c.config.integer("pullback", "sequence_depth")),
                                     scheme);
  c.write("cauchy.csv", cauchy_report_csv(seq.report));
  c.summary.add("slope_per_period", seq.report.slope_per_period);
  c.summary.add_flag("cauchy_pass", seq.report.pass);
  const auto s = random_periodic_path(c.model, path, k, x0, c.config.real("pullback", "tol"),
                                      static_cast<int>(c.config.integer("pullback", "n_cap")),
                                      scheme);
  c.write("rps.csv", random_periodic_path_csv(s));
  c.summary.add("n_used", static_cast<std::int64_t>(s.n_used));
  c.summary.add("last_gap", s.last_gap);
  c.verdict(seq.report.pass);
}

void verify_rps(Context& c) {
  const auto x0 = state_or(c.config, "verify", "x0", c.model, 0.0);
  const auto k = c.config.integer("verify", "phase_index");
  const double tol = c.config.real("verify", "tol");
  const int cap = static_cast<int>(c.config.integer("verify", "n_cap"));
  const auto scheme = scheme_of(c.config, "verify");
  const std::size_t n = count_of(c.config, "verify", "replicas");
  std::vector<RandomPeriodicPath> paths(n);
  std::vector<PeriodicityReport> reports(n);
  parallel_for(n, c.options.workers, [&](std::size_t i) {
    const NoisePath path(replica_seed(c.seed, i), c.model.noise_dim, c.grid);
    paths[i] = random_periodic_path(c.model, path, k, x0, tol, cap, scheme);
    reports[i] = verify_random_periodicity(c.model, path, paths[i]);
  });
  CsvTable table(
      {"replica", "seed", "n_used", "last_gap", "flow_residual", "shift_residual", "pass"});
  bool all = true;
  double worst_flow = 0.0;
  double worst_shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    table.add_row({std::to_string(i), std::to_string(replica_seed(c.seed, i)),
                   std::to_string(paths[i].n_used), format_real(paths[i].last_gap),
                   format_real(reports[i].flow_residual), format_real(reports[i].shift_residual),
                   flag(reports[i].pass)});
    all = all && reports[i].pass;
    worst_flow = std::max(worst_flow, reports[i].flow_residual);
    worst_shift = std::max(worst_shift, reports[i].shift_residual);
  }
  c.write("verify.csv", table);
  c.summary.add("max_flow_residual", worst_flow);
  c.summary.add("max_shift_residual", worst_shift);
  c.summary.add("flow_tolerance", 10.0 * tol);
  c.summary.add_flag("pass", all);
  c.verdict(all);
}

void check(Context& c) {
  const auto spec = sample_spec_of(c.config);
  const double p = c.config.real("check", "p");
  const auto cond = check_drift_conditions(c.model, spec, c.options);
  c.write("conditions.csv", condition_report_csv(cond));
  auto lyap = quadratic_lyapunov(p);
  lyap.lambda_rate = lambda_from_conditions(cond, c.model.period, p, c.model.noise_dim);
  const auto bound = check_generator_bound(c.model, lyap, spec);
  c.summary.add("integral_beta", cond.integral_beta);
  c.summary.add_flag("conditions_pass", cond.pass);
  c.summary.add("generator_max_margin", bound.max_margin);
  c.summary.add("generator_samples", bound.samples);
  c.summary.add_flag("generator_pass", bound.pass);
  c.summary.add_text("note", cond.note);
  c.log << "integral of beta over one period: " << format_real(cond.integral_beta) << '\n';
  c.verdict(cond.pass && bound.pass);
}

void contract(Context& c) {
  const auto x0 = state_or(c.config, "contract", "x0", c.model, 1.0);
  const auto y0 = state_or(c.config, "contract", "y0", c.model, -1.0);
  const auto k0 = c.config.integer("contract", "start_index");
  const int periods = static_cast<int>(c.config.integer("contract", "periods"));
  const auto scheme = scheme_of(c.config, "contract");
  const std::size_t n = count_of(c.config, "contract", "replicas");
  std::vector<ContractionReport> reports(n);
  parallel_for(n, c.options.workers, [&](std::size_t i) {
    const NoisePath path(replica_seed(c.seed, i), c.model.noise_dim, c.grid);
    reports[i] = contraction_report(c.model, path, k0, periods, x0, y0, scheme);
  });
  c.write("contraction.csv", contraction_report_csv(reports[0]));
  CsvTable slopes({"replica", "slope", "truncated"});
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    slopes.add_row({std::to_string(i), format_real(reports[i].slope), flag(reports[i].truncated)});
    values.push_back(reports[i].slope);
  }
  c.write("slopes.csv", slopes);
  const double mean_slope = mean(values);
  c.summary.add("mean_slope", mean_slope);
  c.summary.add("max_slope", c.config.real("contract", "max_slope"));
  c.verdict(mean_slope <= c.config.real("contract", "max_slope"));
}

PullbackParams measure_params(const ExperimentConfig& config, const SdeModel& model) {
  PullbackParams params;
  params.x0 = state_or(config, "measure", "x0", model, 0.0);
  params.tol = config.real("measure", "tol");
  params.n_cap = static_cast<int>(config.integer("measure", "n_cap"));
  return params;
}

void measure(Context& c) {
  const auto params = measure_params(c.config, c.model);
  const std::size_t n = count_of(c.config, "measure", "n");
  const auto phases = c.config.integers("measure", "phases");
  const auto mus = sample_periodic_measures(c.model, c.grid, c.seed, phases, n, params, c.options);
  c.write("measure.csv", measure_csv(mus));
  for (const auto& mu : mus) {
    const std::string tag = "phase" + std::to_string(mu.phase_index) + "_";
    const Estimate m = mean_estimate(mu.samples);
    const Estimate v = variance_estimate(mu.samples);
    const auto support = support_interval(mu);
    c.summary.add(tag + "mean", m.value);
    c.summary.add(tag + "mean_se", m.se);
    c.summary.add(tag + "variance", v.value);
    c.summary.add(tag + "variance_se", v.se);
    c.summary.add(tag + "support_lo", support.lo);
    c.summary.add(tag + "support_hi", support.hi);
  }
  const std::string mode = c.config.text("measure", "invariance");
  std::vector<InvarianceMode> modes;
  if (mode == "both") {
    modes = {InvarianceMode::shifted_paths, InvarianceMode::independent};
  } else if (mode != "none") {
    modes = {invariance_mode_from_string(mode)};
  }
  bool all = true;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto r = check_period_invariance(
        c.model, c.grid, c.seed, c.config.integer("measure", "invariance_phase"), n, modes[i],
        params, c.options, count_of(c.config, "measure", "bootstrap_draws"));
    c.write("invariance_" + to_string(modes[i]) + ".csv", invariance_report_csv(r));
    c.summary.add_flag("invariance_" + to_string(modes[i]) + "_pass", r.pass);
    all = all && r.pass;
  }
  c.verdict(all);
}

// Reference measure at `phase`, drawn from replicas after those used by the
// estimator itself so the two estimates are independent.
std::optional<EmpiricalMeasure> reference_measure(Context& c, const std::string& section,
                                                  std::int64_t phase, std::size_t offset) {
  const std::size_t n = count_of(c.config, section, "reference_n");
  if (n == 0) return std::nullopt;
  return sample_periodic_measure(c.model, c.grid, c.seed, phase, n, {}, c.options, offset);
}

void kb(Context& c) {
  const auto s = c.config.integer("kb", "s_index");
  const auto t = c.config.integer("kb", "t_index");
  const Interval a{c.config.real("kb", "lo"), c.config.real("kb", "hi")};
  const std::size_t n_mc = count_of(c.config, "kb", "n_mc");
  std::optional<Estimate> ref;
  if (auto mu = reference_measure(c, "kb", c.grid.phase_index(t), n_mc)) {
    ref = measure_probability(*mu, a);
  }
  const auto r = kb_average(c.model, c.grid, c.seed, s, c.config.real("kb", "x"), t, a,
                            static_cast<int>(c.config.integer("kb", "n_periods")), n_mc, ref,
                            c.options);
  c.write("kb.csv", kb_report_csv(r));
  c.summary.add("average", r.average);
  c.summary.add("se", r.se);
  if (ref) {
    c.summary.add("reference", ref->value);
    c.summary.add("reference_se", ref->se);
    c.summary.add("difference", r.difference);
    c.summary.add("combined_se", r.combined_se);
  }
  c.summary.add_flag("pass", r.pass);
  c.verdict(r.pass);
}

void ergodic(Context& c) {
  const auto s = c.config.integer("ergodic", "s_index");
  const auto h = test_function_of(c.config, "ergodic");
  std::optional<Estimate> ref;
  if (auto mu = reference_measure(c, "ergodic", s, 0)) ref = expectation(*mu, h);
  const NoisePath path(c.seed, c.model.noise_dim, c.grid);
  const auto r = ergodic_time_average(c.model, path, s, c.config.real("ergodic", "x"), h,
                                      static_cast<int>(c.config.integer("ergodic", "n_periods")),
                                      ref);
  c.write("ergodic.csv", ergodic_report_csv(r));
  c.summary.add("time_average", r.time_average.value);
  c.summary.add("se", r.time_average.se);
  if (ref) {
    c.summary.add("reference", ref->value);
    c.summary.add("reference_se", ref->se);
    c.summary.add("difference", r.difference);
    c.summary.add("combined_se", r.combined_se);
  }
  c.summary.add_flag("pass", r.pass);
  c.verdict(r.pass);
}

void mixing(Context& c) {
  const auto s = c.config.integer("mixing", "s_index");
  const auto h = test_function_of(c.config, "mixing");
  const double p = c.config.real("mixing", "p");
  const auto cond = check_drift_conditions(c.model, sample_spec_of(c.config), c.options);
  auto lyap = quadratic_lyapunov(p);
  lyap.lambda_rate = lambda_from_conditions(cond, c.model.period, p, c.model.noise_dim);
  const std::size_t n = count_of(c.config, "mixing", "n");
  const auto mu = reference_measure(c, "mixing", s, n);
  std::vector<int> ns;
  for (auto v : c.config.integers("mixing", "n_list")) ns.push_back(static_cast<int>(v));
  const auto r = mixing_report(c.model, c.grid, c.seed, s, c.config.real("mixing", "x"),
                               c.config.real("mixing", "y"), h, ns, n, lyap,
                               mu ? &*mu : nullptr, c.options);
  c.write("mixing.csv", mixing_report_csv(r));
  if (mu) {
    CsvTable table({"n", "estimate", "se"});
    for (std::size_t q = 0; q < r.n_values.size(); ++q) {
      table.add_row({std::to_string(r.n_values[q]), format_real(r.measure_estimates[q]),
                     format_real(r.measure_se[q])});
    }
    c.write("mixing_measure.csv", table);
    c.summary.add("measure_ratio", r.measure_ratio);
  }
  c.summary.add_flag("has_fit", r.has_fit);
  c.summary.add("fitted_ratio", r.fitted_ratio);
  c.summary.add("ratio_se", r.ratio_se);
  c.summary.add("bound", r.bound);
  c.summary.add_flag("pass", r.pass);
  c.verdict(r.pass);
}

void bel(Context& c) {
  const auto s = c.config.integer("bel", "s_index");
  const auto h = test_function_of(c.config, "bel");
  const std::vector<double> x{c.config.real("bel", "x")};
  const std::vector<double> v{c.config.real("bel", "v")};
  const auto horizon = c.config.integer("bel", "horizon_steps");
  const std::size_t n = count_of(c.config, "bel", "n");
  const auto g = bel_gradient(c.model, c.grid, c.seed, s, x, v, h, horizon, n, c.options);
  CsvTable table({"n", "estimate", "se"});
  table.add_row({std::to_string(n), format_real(g.value), format_real(g.se)});
  c.summary.add("horizon", static_cast<double>(horizon) * c.grid.dt());
  c.summary.add("bel_estimate", g.value);
  c.summary.add("bel_se", g.se);
  const std::size_t fd_n = count_of(c.config, "bel", "fd_n");
  if (fd_n > 0) {
    const auto fd = finite_difference_gradient(c.model, c.grid, c.seed, s, x, v, h, horizon, fd_n,
                                               c.config.real("bel", "fd_eps"), c.options);
    table.add_row({std::to_string(fd_n), format_real(fd.value), format_real(fd.se)});
    const double diff = std::abs(g.value - fd.value);
    const double se = std::hypot(g.se, fd.se);
    c.summary.add("fd_estimate", fd.value);
    c.summary.add("fd_se", fd.se);
    c.summary.add("difference", diff);
    c.summary.add("combined_se", se);
    c.summary.add_flag("pass", diff <= 3.0 * se);
    c.verdict(diff <= 3.0 * se);
  }
  c.write("bel.csv", table);
}

}  // namespace

std::string version() { return RPSDE_VERSION; }

RunResult run_command(const std::string& command, const ExperimentConfig& config,
                      const std::filesystem::path& out_dir, const RunSettings& settings,
                      std::ostream& log) {
  validate_for_command(config, command);
  const SdeModel model = build_model(config);
  const GridSpec grid = build_grid(config, model.period);
  std::filesystem::create_directories(out_dir);

  Context c{config, model, grid, config.seed(), RunOptions{std::max(1u, settings.workers)},
            out_dir, settings.plots, log, {}, {}};
  const std::string canonical = serialize_config(config);
  {
    std::ofstream out(out_dir / "config.ini", std::ios::binary);
    out << canonical;
  }

  std::string failure;
  try {
    if (command == "simulate") simulate(c);
    else if (command == "pullback") pullback(c);
    else if (command == "verify-rps") verify_rps(c);
    else if (command == "check") check(c);
    else if (command == "contract") contract(c);
    else if (command == "measure") measure(c);
    else if (command == "kb") kb(c);
    else if (command == "ergodic") ergodic(c);
    else if (command == "mixing") mixing(c);
    else if (command == "bel") bel(c);
  } catch (const NonConvergenceError& e) {
    failure = e.what();
    c.result.status = kExitCheckFailed;
    c.summary.add_text("failure", "non-convergence");
  }
  c.write("summary.csv", c.summary.table());

  Manifest manifest;
  manifest.add("version", version());
  manifest.add("command", command);
  manifest.add("config_hash", "fnv1a64:" + hex64(fnv1a64(canonical)));
  manifest.add("seed", std::to_string(c.seed));
  manifest.add("replica_seeds", "replica_seed(seed, i)");
  manifest.add("model", model.id);
  manifest.add("period", format_real(grid.period()));
  manifest.add("steps_per_period", std::to_string(grid.steps_per_period()));
  manifest.add("dt", format_real(grid.dt()));
  manifest.add("status", c.result.status == kExitPass ? "pass" : "fail");
  if (!failure.empty()) manifest.add("failure", failure);
  std::string outputs;
  for (const auto& o : c.result.outputs) outputs += (outputs.empty() ? "" : ",") + o;
  manifest.add("outputs", outputs);
  manifest.write(out_dir / "manifest.txt");
  return c.result;
}

}  // namespace rpsde::app
