#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "rpsde/error.hpp"
#include "rpsde/markov.hpp"
#include "rpsde/oracle.hpp"

using namespace rpsde;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
const GridSpec kGrid = GridSpec::from_dt(kTwoPi, 1e-2);
const SdeModel kOu = build_cubic_scalar({0.0, 0.0});
const SdeModel kCubic = build_cubic_scalar({0.5, 1.0});

// OU with rate 1 on a unit period, so t = 1 is a grid node.
const GridSpec kUnitGrid(1.0, 100);
SdeModel unit_ou() {
  LinearPeriodicSpec spec;
  spec.period = 1.0;
  return build_linear_periodic(spec);
}

SdeModel linear_sine() {
  LinearPeriodicSpec spec;
  spec.alpha = TrigPoly{1.0, {0.5}, {}, 1.0};
  return build_linear_periodic(spec);
}

LyapunovSpec linear_lyapunov() {
  auto v = quadratic_lyapunov(2.0);
  v.lambda_rate = [](double t) { return -2.0 * (1.0 + 0.5 * std::sin(t)); };
  return v;
}

// mu_s of the cubic model at phase 0, shared by the self-consistency tests.
const EmpiricalMeasure& cubic_measure() {
  static const EmpiricalMeasure mu = sample_periodic_measure(kCubic, kGrid, 404, 0, 10000);
  return mu;
}

}  // namespace

TEST(TestFunctions, Catalogue) {
  EXPECT_EQ(make_test_function("identity")(-2.5), -2.5);
  EXPECT_EQ(make_test_function("square")(-3.0), 9.0);
  EXPECT_EQ(make_test_function("one")(1e9), 1.0);
  EXPECT_TRUE(std::isinf(make_test_function("square").sup_norm));
  const std::vector<double> c{-1.0, 2.0};
  const auto clamp = make_test_function("clamp", c);
  EXPECT_EQ(clamp(5.0), 2.0);
  EXPECT_EQ(clamp(-5.0), -1.0);
  EXPECT_EQ(clamp.sup_norm, 2.0);
  const auto ind = make_test_function("indicator", c);
  EXPECT_EQ(ind(-1.0), 1.0);
  EXPECT_EQ(ind(2.0), 0.0);
  const std::vector<double> m{0.0, 1.0, 0.2};
  const auto moll = make_test_function("mollified_indicator", m);
  EXPECT_EQ(moll(0.5), 1.0);
  EXPECT_NEAR(moll(0.0), 0.5, 1e-15);
  EXPECT_EQ(moll(-0.2), 0.0);
  EXPECT_EQ(moll.sup_norm, 1.0);
}

TEST(TestFunctions, Errors) {
  EXPECT_THROW(make_test_function("cosine"), InvalidArgument);
  EXPECT_THROW(make_test_function("clamp"), InvalidArgument);
  const std::vector<double> bad{2.0, 1.0};
  EXPECT_THROW(make_test_function("clamp", bad), InvalidArgument);
  const std::vector<double> no_width{0.0, 1.0, 0.0};
  EXPECT_THROW(make_test_function("mollified_indicator", no_width), InvalidArgument);
}

TEST(TestFunctions, MollifiedIndicatorIsLipschitz) {
  proptest::Gen gen(8);
  const std::vector<double> m{-1.0, 1.5, 0.1};
  const auto h = make_test_function("mollified_indicator", m);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = gen.real(-3.0, 3.0);
    const double b = gen.real(-3.0, 3.0);
    ASSERT_LE(std::abs(h(a) - h(b)), std::abs(a - b) / 0.1 + 1e-12);
  }
}

TEST(Expectation, SampleMean) {
  EmpiricalMeasure mu;
  mu.samples = {1.0, 2.0, 3.0};
  EXPECT_NEAR(expectation(mu, make_test_function("square")).value, 14.0 / 3.0, 1e-14);
  mu.dim = 3;
  EXPECT_THROW(expectation(mu, make_test_function("one")), CapabilityError);
}

TEST(Transition, SymmetricHalfLine) {
  const auto p = transition_probability(unit_ou(), kUnitGrid, 1, 0, 0.0, 100,
                                        Interval{-kInf, 0.0}, 10000);
  EXPECT_NEAR(p.value, 0.5, 3.0 * p.se);
}

TEST(Transition, GaussianOracle) {
  const auto q = ou_transition(1.0, 0.0, 1.0, 0.0);
  const double expected = normal_cdf(0.5 / std::sqrt(q.variance));
  EXPECT_NEAR(expected, 0.7766, 1e-4);
  const auto p = transition_probability(unit_ou(), kUnitGrid, 2, 0, 0.0, 100,
                                        Interval{-kInf, 0.5}, 100000);
  EXPECT_NEAR(p.value, expected, 3.0 * p.se);
}

TEST(Transition, WholeLineAndMonotone) {
  const auto whole = transition_probability(kCubic, kGrid, 3, 0, 1.0, 50, Interval::whole(), 500);
  EXPECT_EQ(whole.value, 1.0);
  EXPECT_EQ(whole.hits, 500u);
  proptest::Gen gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const double lo = gen.real(-2.0, 0.0);
    const double hi = gen.real(0.0, 2.0);
    const double grow = gen.real(0.0, 1.0);
    const auto small = transition_probability(kCubic, kGrid, 4, 0, 1.0, 50, Interval{lo, hi}, 300);
    const auto big =
        transition_probability(kCubic, kGrid, 4, 0, 1.0, 50, Interval{lo - grow, hi + grow}, 300);
    ASSERT_LE(small.hits, big.hits);
  }
}

TEST(Transition, Preconditions) {
  EXPECT_THROW(transition_probability(kOu, kGrid, 1, 0, 0.0, 10, Interval{}, 99), InvalidArgument);
  EXPECT_THROW(transition_probability(kOu, kGrid, 1, 0, 0.0, 0, Interval{}, 100), InvalidArgument);
}

TEST(Kb, OuHalfLine) {
  const auto r = kb_average(kOu, kGrid, 5, 0, 1.0, 0, Interval{-kInf, 0.0}, 20, 10000);
  EXPECT_EQ(r.per_n.size(), 20u);
  EXPECT_NEAR(r.average, 0.5, 3.0 * r.se);
}

TEST(Kb, OnePeriodIsTheTransitionProbability) {
  const Interval a{-0.3, 0.4};
  const std::int64_t s = 37;
  const auto r = kb_average(kCubic, kGrid, 6, s, 0.8, s, a, 1, 400);
  const auto p =
      transition_probability(kCubic, kGrid, 6, s, 0.8, kGrid.steps_per_period(), a, 400);
  EXPECT_EQ(r.hits[0], p.hits);
  EXPECT_EQ(r.average, p.value);
}

TEST(Kb, ComplementsSumToOne) {
  proptest::Gen gen(10);
  for (int trial = 0; trial < 5; ++trial) {
    const double cut = gen.real(-1.0, 1.0);
    const auto lo = kb_average(kCubic, kGrid, 7, 0, 0.2, 100, Interval{-kInf, cut}, 4, 200);
    const auto hi = kb_average(kCubic, kGrid, 7, 0, 0.2, 100, Interval{cut, kInf}, 4, 200);
    for (std::size_t q = 0; q < lo.hits.size(); ++q) EXPECT_EQ(lo.hits[q] + hi.hits[q], 200u);
    EXPECT_EQ(lo.average + hi.average, 1.0);
  }
}

TEST(Kb, CubicMatchesPeriodicMeasure) {
  const auto& mu = cubic_measure();
  const auto support = support_interval(mu);
  const Interval lower{support.lo, 0.5 * (support.lo + support.hi)};
  const Estimate ref = measure_probability(mu, lower);
  const auto r = kb_average(kCubic, kGrid, 8, 0, 0.0, 0, lower, 10, 10000, ref);
  EXPECT_LE(r.difference, 3.0 * r.combined_se);
  EXPECT_TRUE(r.pass);
}

TEST(Kb, Preconditions) {
  EXPECT_THROW(kb_average(kOu, kGrid, 1, 10, 0.0, 5, Interval{}, 2, 10), InvalidArgument);
  EXPECT_THROW(kb_average(kOu, kGrid, 1, 0, 0.0, kGrid.steps_per_period(), Interval{}, 2, 10),
               InvalidArgument);
  EXPECT_THROW(kb_average(kOu, kGrid, 1, 0, 0.0, 0, Interval{}, 0, 10), InvalidArgument);
}

TEST(Ergodic, OuSecondMoment) {
  const NoisePath path(11, 1, kGrid);
  const auto r = ergodic_time_average(kOu, path, 0, 0.0, make_test_function("square"), 10000,
                                      Estimate{0.5, 0.0});
  EXPECT_LE(r.difference, 3.0 * r.combined_se);
  EXPECT_TRUE(r.pass);
}

TEST(Ergodic, ConstantObservable) {
  const NoisePath path(12, 1, kGrid);
  const auto r = ergodic_time_average(kCubic, path, 3, 2.0, make_test_function("one"), 20);
  EXPECT_EQ(r.time_average.value, 1.0);
  EXPECT_EQ(r.periods, 20u);
  EXPECT_THROW(ergodic_time_average(kCubic, path, 0, 0.0, make_test_function("one"), 9),
               InvalidArgument);
}

TEST(Ergodic, CubicMeanMatchesMeasure) {
  const NoisePath path(13, 1, kGrid);
  const auto h = make_test_function("identity");
  const auto r =
      ergodic_time_average(kCubic, path, 0, 0.0, h, 10000, expectation(cubic_measure(), h));
  EXPECT_LE(r.difference, 3.0 * r.combined_se);
}

TEST(Mixing, LinearContractionRate) {
  const std::vector<double> c{-1.0, 1.0};
  const auto h = make_test_function("clamp", c);
  const std::vector<int> ns{1, 2, 3};
  const auto r = mixing_report(linear_sine(), kGrid, 14, 0, 0.5, -0.5, h, ns, 2000,
                               linear_lyapunov());
  ASSERT_TRUE(r.has_fit);
  EXPECT_NEAR(r.bound, std::exp(-kTwoPi), 1e-9);
  EXPECT_LE(r.fitted_ratio, std::exp(-kTwoPi) + 3.0 * r.ratio_se);
  EXPECT_TRUE(r.pass);
  for (std::size_t q = 1; q < r.pair_estimates.size(); ++q) {
    EXPECT_LT(r.pair_estimates[q], r.pair_estimates[q - 1]);
  }
}

TEST(Mixing, EqualStartsGiveZero) {
  const auto h = make_test_function("tanh");
  const std::vector<int> ns{1, 2};
  const auto r = mixing_report(kCubic, kGrid, 15, 0, 0.3, 0.3, h, ns, 50, linear_lyapunov());
  for (double e : r.pair_estimates) EXPECT_EQ(e, 0.0);
  EXPECT_FALSE(r.has_fit);
}

TEST(Mixing, SinglePeriodHasNoFit) {
  const auto h = make_test_function("tanh");
  const std::vector<int> ns{1};
  const auto r = mixing_report(kCubic, kGrid, 16, 0, 1.0, -1.0, h, ns, 100, linear_lyapunov(),
                               &cubic_measure());
  EXPECT_FALSE(r.has_fit);
  EXPECT_EQ(r.pair_estimates.size(), 1u);
  EXPECT_EQ(r.measure_estimates.size(), 1u);
}

TEST(Mixing, PairFamilyScalesWithDistance) {
  // With a clamp far outside the reachable range T h is affine for the linear model.
  const std::vector<double> c{-100.0, 100.0};
  const auto h = make_test_function("clamp", c);
  const std::vector<int> ns{1};
  const auto one = mixing_report(linear_sine(), kGrid, 17, 0, 0.5, 0.0, h, ns, 500,
                                 linear_lyapunov());
  const auto two = mixing_report(linear_sine(), kGrid, 17, 0, 1.0, 0.0, h, ns, 500,
                                 linear_lyapunov());
  const double combined = std::hypot(2.0 * one.pair_se[0], two.pair_se[0]);
  EXPECT_NEAR(two.pair_estimates[0], 2.0 * one.pair_estimates[0],
              3.0 * combined + 1e-12 * two.pair_estimates[0]);
}

TEST(Mixing, Preconditions) {
  const auto h = make_test_function("identity");
  const std::vector<int> ns{1, 2};
  EXPECT_THROW(mixing_report(kCubic, kGrid, 1, 0, 1.0, 0.0, h, ns, 10, linear_lyapunov()),
               InvalidArgument);
  const std::vector<int> unordered{2, 1};
  EXPECT_THROW(mixing_report(kCubic, kGrid, 1, 0, 1.0, 0.0, make_test_function("tanh"), unordered,
                             10, linear_lyapunov()),
               InvalidArgument);
  EXPECT_THROW(mixing_report(kCubic, kGrid, 1, 0, 1.0, 0.0, make_test_function("tanh"), ns, 10,
                             quadratic_lyapunov(2.0)),
               InvalidArgument);
}

TEST(Bel, OuDerivativeOfMean) {
  const auto h = make_test_function("identity");
  const auto g = bel_gradient(unit_ou(), kUnitGrid, 18, 0, std::vector{0.0}, std::vector{1.0}, h,
                              100, 100000);
  EXPECT_NEAR(g.value, std::exp(-1.0), 3.0 * g.se);
}

TEST(Bel, ConstantObservableHasZeroGradient) {
  const auto g = bel_gradient(unit_ou(), kUnitGrid, 19, 0, std::vector{0.4}, std::vector{1.0},
                              make_test_function("one"), 100, 20000);
  EXPECT_NEAR(g.value, 0.0, 3.0 * g.se);
}

TEST(Bel, AgreesWithFiniteDifference) {
  // The left-point sum carries an O(dt) bias, about 1% of the gradient at
  // dt = 1e-2, so the comparison runs on a finer grid.
  const auto grid = GridSpec::from_dt(kTwoPi, 1e-3);
  const auto h = make_test_function("tanh");
  const std::int64_t steps = 1000;
  const auto bel = bel_gradient(kCubic, grid, 20, 0, std::vector{0.5}, std::vector{1.0}, h,
                                steps, 50000);
  const auto fd = finite_difference_gradient(kCubic, grid, 20, 0, std::vector{0.5},
                                             std::vector{1.0}, h, steps, 20000, 1e-3);
  EXPECT_LE(std::abs(bel.value - fd.value), 3.0 * std::hypot(bel.se, fd.se));
}

TEST(Bel, LinearInDirection) {
  const auto h = make_test_function("tanh");
  proptest::Gen gen(21);
  for (int trial = 0; trial < 5; ++trial) {
    const double v = gen.real(-2.0, 2.0);
    const double w = gen.real(-2.0, 2.0);
    const double a = gen.real(-3.0, 3.0);
    const double b = gen.real(-3.0, 3.0);
    const auto sv = bel_samples(kCubic, kGrid, 22, 5, std::vector{0.7}, std::vector{v}, h, 80, 50);
    const auto sw = bel_samples(kCubic, kGrid, 22, 5, std::vector{0.7}, std::vector{w}, h, 80, 50);
    const auto sc = bel_samples(kCubic, kGrid, 22, 5, std::vector{0.7},
                                std::vector{a * v + b * w}, h, 80, 50);
    for (std::size_t i = 0; i < sc.size(); ++i) {
      ASSERT_NEAR(sc[i], a * sv[i] + b * sw[i], 1e-10);
    }
  }
}

TEST(Bel, NeedsRightInverse) {
  SdeModel model = kCubic;
  model.diffusion_right_inverse.reset();
  EXPECT_THROW(bel_gradient(model, kGrid, 1, 0, std::vector{0.0}, std::vector{1.0},
                            make_test_function("tanh"), 10, 10),
               CapabilityError);
}

TEST(MarkovCsv, Schemas) {
  const std::vector<std::string> header{"n", "estimate", "se"};
  const auto kb = kb_average(kOu, kGrid, 1, 0, 0.0, 0, Interval{-kInf, 0.0}, 3, 10);
  EXPECT_EQ(kb_report_csv(kb).header(), header);
  EXPECT_EQ(kb_report_csv(kb).rows(), 3u);
  const std::vector<int> ns{1, 2};
  const auto mix = mixing_report(kCubic, kGrid, 1, 0, 1.0, 0.0, make_test_function("tanh"), ns,
                                 10, linear_lyapunov());
  EXPECT_EQ(mixing_report_csv(mix).header(), header);
  EXPECT_EQ(mixing_report_csv(mix).rows(), 2u);
  const NoisePath path(1, 1, kGrid);
  const auto erg = ergodic_time_average(kOu, path, 0, 0.0, make_test_function("one"), 10);
  EXPECT_EQ(ergodic_report_csv(erg).header(), header);
}
