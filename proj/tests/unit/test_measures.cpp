#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "rpsde/error.hpp"
#include "rpsde/measures.hpp"
#include "rpsde/oracle.hpp"
#include "rpsde/pullback.hpp"

using namespace rpsde;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const GridSpec kGrid = GridSpec::from_dt(kTwoPi, 1e-2);
const SdeModel kOu = build_cubic_scalar({0.0, 0.0});
const SdeModel kCubic = build_cubic_scalar({0.5, 1.0});

LinearPeriodicSpec sine_rate() {
  LinearPeriodicSpec spec;
  spec.alpha = TrigPoly{1.0, {0.5}, {}, 1.0};
  return spec;
}

// Integral of |F - G| over the line, the CDF form of W1.
double w1_by_cdf(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> pts(a);
  pts.insert(pts.end(), b.begin(), b.end());
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double x = pts[i];
    const auto fa = static_cast<double>(std::upper_bound(a.begin(), a.end(), x) - a.begin());
    const auto fb = static_cast<double>(std::upper_bound(b.begin(), b.end(), x) - b.begin());
    total += std::abs(fa / static_cast<double>(a.size()) - fb / static_cast<double>(b.size())) *
             (pts[i + 1] - x);
  }
  return total;
}

EmpiricalMeasure make_measure(std::vector<double> xs) {
  EmpiricalMeasure mu;
  mu.samples = std::move(xs);
  return mu;
}

}  // namespace

TEST(SampleMeasure, OuMomentsAtStationaryLaw) {
  const std::size_t n = 10000;
  const auto mu = sample_periodic_measure(kOu, kGrid, 2024, 0, n);
  ASSERT_EQ(mu.count(), n);
  EXPECT_NEAR(mean(mu.samples), 0.0, 3.0 * 0.7071 / std::sqrt(static_cast<double>(n)));
  const Estimate v = variance_estimate(mu.samples);
  EXPECT_NEAR(v.value, 0.5, 3.0 * v.se);
}

TEST(SampleMeasure, SingleReplicaIsThePullbackValue) {
  const std::int64_t s = 123;
  PullbackParams params;
  const auto mu = sample_periodic_measure(kCubic, kGrid, 77, s, 1, params);
  ASSERT_EQ(mu.count(), 1u);
  const NoisePath path(replica_seed(77, 0), 1, kGrid);
  const auto rpp = random_periodic_path(kCubic, path, s, std::vector{0.0}, params.tol,
                                        params.n_cap);
  EXPECT_EQ(mu.samples[0], rpp.at(0)[0]);
  EXPECT_EQ(mu.phase, kGrid.time(s));
  EXPECT_EQ(mu.model_id, kCubic.id);
}

TEST(SampleMeasure, LinearVarianceMatchesOracle) {
  const auto spec = sine_rate();
  const LinearOracle oracle(spec);
  const std::int64_t s = kGrid.steps_per_period() / 4;
  const auto mu = sample_periodic_measure(build_linear_periodic(spec), kGrid, 5, s, 10000);
  const Estimate v = variance_estimate(mu.samples);
  EXPECT_NEAR(v.value, linear_phase_variance(oracle, kGrid.time(s)), 3.0 * v.se);
}

TEST(SampleMeasure, ReplicaValuesIndependentOfCountAndWorkers) {
  const auto a = sample_periodic_measure(kCubic, kGrid, 8, 40, 6, {}, {1});
  const auto b = sample_periodic_measure(kCubic, kGrid, 8, 40, 12, {}, {3});
  for (std::size_t i = 0; i < a.count(); ++i) EXPECT_EQ(a.samples[i], b.samples[i]);
  const auto tail = sample_periodic_measure(kCubic, kGrid, 8, 40, 4, {}, {2}, 8);
  for (std::size_t i = 0; i < tail.count(); ++i) EXPECT_EQ(tail.samples[i], b.samples[i + 8]);
}

TEST(SampleMeasure, Preconditions) {
  EXPECT_THROW(sample_periodic_measure(kCubic, kGrid, 1, 0, 0), EmptyEnsembleError);
  EXPECT_THROW(sample_periodic_measure(kCubic, kGrid, 1, -1, 3), InvalidArgument);
  EXPECT_THROW(sample_periodic_measure(kCubic, kGrid, 1, kGrid.steps_per_period(), 3),
               InvalidArgument);
  PullbackParams tight;
  tight.tol = 1e-300;
  tight.n_cap = 3;
  EXPECT_THROW(sample_periodic_measure(kCubic, kGrid, 1, 0, 4, tight), NonConvergenceError);
}

TEST(SampleMeasure, MultiPhaseMatchesAnchoredPullback) {
  const std::vector<std::int64_t> phases{0, 100, 400};
  const auto mus = sample_periodic_measures(kCubic, kGrid, 9, phases, 5);
  ASSERT_EQ(mus.size(), 3u);
  const NoisePath path(replica_seed(9, 2), 1, kGrid);
  const auto rpp = random_periodic_path(kCubic, path, 0, std::vector{0.0}, 1e-8, 200);
  for (std::size_t q = 0; q < phases.size(); ++q) {
    EXPECT_EQ(mus[q].phase_index, phases[q]);
    EXPECT_EQ(mus[q].samples[2], rpp.at(static_cast<std::size_t>(phases[q]))[0]);
  }
}

TEST(Wasserstein, Examples) {
  const std::vector<double> a{0.3, -1.0, 2.0};
  EXPECT_EQ(wasserstein1(a, a), 0.0);
  EXPECT_EQ(wasserstein1(std::vector{0.0}, std::vector{1.0}), 1.0);
  EXPECT_EQ(wasserstein1(std::vector{0.0, 2.0}, std::vector{3.0, 1.0}), 1.0);
}

TEST(Wasserstein, UnequalCountsMatchCdfIntegral) {
  proptest::Gen gen(41);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = gen.reals(static_cast<std::size_t>(gen.integer(1, 30)), -3.0, 3.0);
    const auto b = gen.reals(static_cast<std::size_t>(gen.integer(1, 30)), -2.0, 4.0);
    ASSERT_NEAR(wasserstein1(a, b), w1_by_cdf(a, b), 1e-12);
  }
}

TEST(Wasserstein, MetricProperties) {
  proptest::Gen gen(42);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = gen.reals(static_cast<std::size_t>(gen.integer(1, 20)), -5.0, 5.0);
    const auto b = gen.reals(static_cast<std::size_t>(gen.integer(1, 20)), -5.0, 5.0);
    const auto c = gen.reals(static_cast<std::size_t>(gen.integer(1, 20)), -5.0, 5.0);
    const double ab = wasserstein1(a, b);
    ASSERT_EQ(ab, wasserstein1(b, a));
    ASSERT_LE(wasserstein1(a, c), ab + wasserstein1(b, c) + 1e-12);
    ASSERT_GE(ab, 0.0);
  }
}

TEST(Wasserstein, RejectsMultivariateAndEmpty) {
  auto mu = make_measure({0.0, 1.0, 2.0, 3.0});
  mu.dim = 2;
  EXPECT_THROW(wasserstein1(mu, mu), CapabilityError);
  EXPECT_THROW(wasserstein1(std::vector<double>{}, std::vector{1.0}), EmptyEnsembleError);
}

TEST(Invariance, ShiftedPathsBitExact) {
  const SdeModel linear = build_linear_periodic(sine_rate());
  for (const SdeModel* model : {&kOu, &kCubic, &linear}) {
    const auto r = check_period_invariance(*model, kGrid, 3, 57, 20, InvarianceMode::shifted_paths);
    EXPECT_EQ(r.max_discrepancy, 0.0) << model->id;
    EXPECT_EQ(r.mismatched_replicas, 0u);
    EXPECT_TRUE(r.pass);
  }
}

TEST(Invariance, IndependentOu) {
  const auto r = check_period_invariance(kOu, kGrid, 11, 0, 10000, InvarianceMode::independent);
  EXPECT_GT(r.bootstrap_se, 0.0);
  EXPECT_LE(r.w1, 3.0 * r.bootstrap_se);
  EXPECT_TRUE(r.pass);
}

TEST(Invariance, IndependentLinearPeriodic) {
  const auto r = check_period_invariance(build_linear_periodic(sine_rate()), kGrid, 12, 0, 10000,
                                         InvarianceMode::independent);
  EXPECT_LE(r.w1, 3.0 * r.bootstrap_se);
  EXPECT_TRUE(r.pass);
}

TEST(Invariance, ModeNames) {
  for (auto mode : {InvarianceMode::shifted_paths, InvarianceMode::independent}) {
    EXPECT_EQ(invariance_mode_from_string(to_string(mode)), mode);
  }
  EXPECT_THROW(invariance_mode_from_string("sideways"), InvalidArgument);
}

TEST(Support, Examples) {
  const auto dirac = support_interval(make_measure({5.0, 5.0, 5.0}));
  EXPECT_EQ(dirac.lo, 5.0);
  EXPECT_EQ(dirac.hi, 5.0);
  const auto full = support_interval(make_measure({3.0, -1.0, 0.5, 7.0}), 1.0);
  EXPECT_EQ(full.lo, -1.0);
  EXPECT_EQ(full.hi, 7.0);
}

TEST(Support, OuQuantiles) {
  // Coarse grid: the Euler spread sqrt(1 / (2 - dt)) shifts the edge by 0.03.
  PullbackParams params;
  params.tol = 1e-6;
  const auto mu =
      sample_periodic_measure(kOu, GridSpec::from_dt(kTwoPi, 5e-2), 31, 0, 100000, params);
  const auto s = support_interval(mu, 0.999);
  const double edge = normal_quantile(0.9995) * std::sqrt(0.5);
  EXPECT_NEAR(edge, 2.327, 1e-3);
  EXPECT_NEAR(s.lo, -edge, 0.1);
  EXPECT_NEAR(s.hi, edge, 0.1);
}

TEST(Support, NestedInCoverage) {
  proptest::Gen gen(5);
  const auto mu = make_measure(gen.reals(500, -2.0, 9.0));
  double prev_lo = 1e300;
  double prev_hi = -1e300;
  for (double c : {0.1, 0.5, 0.9, 0.99, 1.0}) {
    const auto s = support_interval(mu, c);
    EXPECT_LE(s.lo, prev_lo);
    EXPECT_GE(s.hi, prev_hi);
    prev_lo = s.lo;
    prev_hi = s.hi;
  }
}

TEST(MeasureProbability, CountsHalfOpenInterval) {
  const auto mu = make_measure({-1.0, 0.0, 0.5, 1.0});
  const auto p = measure_probability(mu, Interval{0.0, 1.0});
  EXPECT_EQ(p.value, 0.5);
  EXPECT_NEAR(p.se, std::sqrt(0.25 / 4.0), 1e-15);
  EXPECT_EQ(measure_probability(mu, Interval::whole()).value, 1.0);
}

TEST(MeasureProbability, ComplementsSumToOne) {
  proptest::Gen gen(6);
  const auto mu = make_measure(gen.reals(1000, -3.0, 3.0));
  for (int trial = 0; trial < 50; ++trial) {
    const double cut = gen.real(-4.0, 4.0);
    const double lo = measure_probability(mu, Interval{-INFINITY, cut}).value;
    const double hi = measure_probability(mu, Interval{cut, INFINITY}).value;
    EXPECT_NEAR(lo + hi, 1.0, 1e-15);
  }
}

TEST(OuProperties, KolmogorovSmirnovOverSeeds) {
  // dt = 0.05 keeps 100 ensembles affordable; the Euler stationary variance
  // 1 / (2 - dt) moves the KS statistic by about 0.003, well inside the band.
  const auto grid = GridSpec::from_dt(kTwoPi, 5e-2);
  PullbackParams params;
  params.tol = 1e-6;
  const std::size_t n = 10000;
  const double critical = 1.63 / std::sqrt(static_cast<double>(n));
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto mu = sample_periodic_measure(kOu, grid, seed, 0, n, params);
    if (ks_statistic_normal(mu.samples, 0.0, std::sqrt(0.5)) < critical) ++passed;
  }
  EXPECT_GE(passed, 95);
}

TEST(MeasuresCsv, Schemas) {
  const std::vector<std::int64_t> phases{0, 10};
  const auto mus = sample_periodic_measures(kCubic, kGrid, 1, phases, 3);
  const auto table = measure_csv(mus);
  EXPECT_EQ(table.header(), (std::vector<std::string>{"phase", "sample_index", "x1"}));
  EXPECT_EQ(table.rows(), 6u);
  const auto r = check_period_invariance(kCubic, kGrid, 3, 0, 4, InvarianceMode::shifted_paths);
  EXPECT_GE(invariance_report_csv(r).rows(), 1u);
}
