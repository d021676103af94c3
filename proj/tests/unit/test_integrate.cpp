#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "rpsde/error.hpp"
#include "rpsde/integrate.hpp"

using namespace rpsde;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SdeModel unit_rate(double noise, double period = 1.0) {
  LinearPeriodicSpec spec;
  spec.noise_scale = noise;
  spec.period = period;
  return build_linear_periodic(spec);
}

SdeModel linear_sine() {
  LinearPeriodicSpec spec;
  spec.alpha = TrigPoly{1.0, {0.5}, {}, 1.0};
  return build_linear_periodic(spec);
}

const SdeModel kCubic = build_cubic_scalar({0.5, 1.0});

}  // namespace

TEST(Integrate, DeterministicDecayMatchesExponential) {
  const auto model = unit_rate(0.0);
  const NoisePath path(1, 1, GridSpec(1.0, 10000));
  const auto tr = integrate_times(model, path, 0.0, 1.0, std::vector{1.0});
  EXPECT_NEAR(tr.final_state()[0], std::exp(-1.0), 1e-3);
  EXPECT_EQ(tr.nodes(), 10001u);
  EXPECT_EQ(tr.at(0)[0], 1.0);
}

TEST(Integrate, SingleCubicEulerStep) {
  const auto grid = GridSpec::from_dt(kTwoPi, 0.01);
  Stepper stepper(kCubic, grid, Scheme::euler);
  std::vector<double> x{1.0};
  stepper.step(0, x, std::vector{0.02});
  EXPECT_EQ(x[0], 1.0 + (-1.0 - 1.0) * grid.dt() + 0.02);
  EXPECT_NEAR(x[0], 1.0, 2.0 * std::abs(grid.dt() - 0.01) + 1e-15);
}

TEST(Integrate, CocycleIsBitExact) {
  proptest::Gen gen(23);
  const auto grid = GridSpec::from_dt(kTwoPi, 1e-2);
  for (int trial = 0; trial < 30; ++trial) {
    const NoisePath path(gen.word(), 1, grid);
    const auto k0 = gen.integer(-2000, 0);
    const auto k1 = k0 + gen.integer(0, 1000);
    const auto k2 = k1 + gen.integer(0, 1000);
    const std::vector<double> x0{gen.real(-3, 3)};
    const auto whole = integrate_final(kCubic, path, k0, k2, x0);
    const auto mid = integrate_final(kCubic, path, k0, k1, x0);
    const auto rest = integrate_final(kCubic, path, k1, k2, mid);
    ASSERT_EQ(whole, rest);
    const auto tr = integrate(kCubic, path, k0, k2, x0);
    ASSERT_EQ(tr.final_state()[0], whole[0]);
    ASSERT_EQ(tr.at(static_cast<std::size_t>(k1 - k0))[0], mid[0]);
  }
}

TEST(Integrate, ThetaConjugacyIsBitExact) {
  proptest::Gen gen(29);
  const auto grid = GridSpec::from_dt(kTwoPi, 1e-2);
  const auto n = grid.steps_per_period();
  for (int trial = 0; trial < 20; ++trial) {
    const NoisePath path(gen.word(), 1, grid);
    const auto k = gen.integer(-500, 500);
    const auto depth = gen.integer(1, 4);
    const std::vector<double> x0{gen.real(-3, 3)};
    const auto shifted = integrate(kCubic, path.shift(n), k - depth * n, k, x0);
    const auto ahead = integrate(kCubic, path, k + n - depth * n, k + n, x0);
    ASSERT_EQ(shifted.states, ahead.states);
  }
}

TEST(Integrate, RejectsMisalignedAndReversedTimes) {
  const auto model = unit_rate(1.0);
  const NoisePath path(1, 1, GridSpec(1.0, 10));
  EXPECT_THROW(integrate_times(model, path, 0.0, 0.55, std::vector{0.0}), AlignmentError);
  EXPECT_THROW(integrate_times(model, path, 0.5, 0.2, std::vector{0.0}), InvalidArgument);
  EXPECT_THROW(integrate_times(model, path, 0.0, 0.5, std::vector{0.0, 1.0}), InvalidArgument);
}

TEST(Integrate, RejectsMismatchedGrid) {
  const NoisePath path(1, 1, GridSpec(2.0, 10));
  EXPECT_THROW(integrate(unit_rate(1.0), path, 0, 5, std::vector{0.0}), GridMismatchError);
  const NoisePath wide(1, 2, GridSpec(1.0, 10));
  EXPECT_THROW(integrate(unit_rate(1.0), wide, 0, 5, std::vector{0.0}), GridMismatchError);
}

TEST(Integrate, NegativeTimesAreAllowed) {
  const NoisePath path(3, 1, GridSpec::from_dt(kTwoPi, 1e-2));
  const auto tr = integrate(kCubic, path, -700, -100, std::vector{0.5});
  EXPECT_EQ(tr.nodes(), 601u);
  EXPECT_TRUE(std::isfinite(tr.final_state()[0]));
}

TEST(Integrate, DivergenceCarriesFirstBadStep) {
  const NoisePath path(1, 1, GridSpec(kTwoPi, 6));
  try {
    (void)integrate(kCubic, path, 0, 6, std::vector{1e3});
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.step(), 0);
    EXPECT_LT(e.step(), 6);
    // Every earlier step stays finite.
    if (e.step() > 0) {
      EXPECT_NO_THROW((void)integrate(kCubic, path, 0, e.step(), std::vector{1e3}));
    }
  }
}

TEST(Integrate, MilsteinRestrictions) {
  PolynomialModelSpec spec;
  spec.state_dim = 2;
  spec.noise_dim = 1;
  spec.period = 1.0;
  spec.drift = {{{TrigPoly{-1.0}, {1, 0}}}, {{TrigPoly{-1.0}, {0, 1}}}};
  spec.diffusion = {{{TrigPoly{1.0}, {0, 0}}}, {{TrigPoly{1.0}, {0, 0}}}};
  const auto planar = build_polynomial(spec);
  const NoisePath path(1, 1, GridSpec(1.0, 10));
  EXPECT_THROW(integrate(planar, path, 0, 5, std::vector{0.0, 0.0}, Scheme::milstein),
               CapabilityError);
}

TEST(Integrate, MilsteinEqualsEulerForAdditiveNoise) {
  const NoisePath path(5, 1, GridSpec::from_dt(kTwoPi, 1e-2));
  const auto a = integrate(kCubic, path, 0, 500, std::vector{0.3}, Scheme::euler);
  const auto b = integrate(kCubic, path, 0, 500, std::vector{0.3}, Scheme::milstein);
  EXPECT_EQ(a.states, b.states);
}

TEST(Integrate, MilsteinCorrectionForMultiplicativeNoise) {
  PolynomialModelSpec spec;
  spec.period = 1.0;
  spec.drift = {{{TrigPoly{-1.0}, {1}}}};
  spec.diffusion = {{{TrigPoly{0.5}, {1}}}};
  const auto gbm = build_polynomial(spec);
  const GridSpec grid(1.0, 100);
  Stepper stepper(gbm, grid, Scheme::milstein);
  std::vector<double> x{2.0};
  const double dw = 0.05;
  stepper.step(0, x, std::vector{dw});
  const double dt = grid.dt();
  EXPECT_DOUBLE_EQ(x[0], 2.0 - 2.0 * dt + 1.0 * dw + 0.5 * 1.0 * 0.5 * (dw * dw - dt));
}

TEST(IntegratePair, EqualStartsGiveIdenticalTrajectories) {
  const NoisePath path(7, 1, GridSpec::from_dt(kTwoPi, 1e-2));
  const auto [a, b] = integrate_pair(kCubic, path, 0, 700, std::vector{0.4}, std::vector{0.4});
  EXPECT_EQ(a.states, b.states);
}

TEST(IntegratePair, ComponentsMatchStandaloneRuns) {
  const NoisePath path(8, 1, GridSpec::from_dt(kTwoPi, 1e-2));
  const auto [a, b] = integrate_pair(kCubic, path, -100, 600, std::vector{1.0}, std::vector{-2.0});
  EXPECT_EQ(a.states, integrate(kCubic, path, -100, 600, std::vector{1.0}).states);
  EXPECT_EQ(b.states, integrate(kCubic, path, -100, 600, std::vector{-2.0}).states);
}

TEST(IntegratePair, LinearGapIsDeterministicProduct) {
  const auto model = linear_sine();
  const auto grid = GridSpec::from_dt(kTwoPi, 1e-3);
  const NoisePath path(9, 1, grid);
  const auto [a, b] = integrate_pair(model, path, 0, 3000, std::vector{1.5}, std::vector{-0.5});
  double product = 2.0;
  const TrigPoly alpha{1.0, {0.5}, {}, 1.0};
  for (std::int64_t k = 0; k < 3000; ++k) product *= 1.0 - alpha(grid.phase_time(k)) * grid.dt();
  const double gap = a.final_state()[0] - b.final_state()[0];
  EXPECT_NEAR(gap, product, 1e-12);
}

TEST(DerivativeFlow, ZeroDirectionStaysZero) {
  const NoisePath path(10, 1, GridSpec::from_dt(kTwoPi, 1e-2));
  const auto tv = derivative_flow(kCubic, path, 0, 300, std::vector{0.7}, std::vector{0.0});
  for (double v : tv.states) EXPECT_EQ(v, 0.0);
}

TEST(DerivativeFlow, LinearProductClosedForm) {
  const NoisePath path(11, 1, GridSpec(1.0, 10000));
  const auto tv =
      derivative_flow(unit_rate(1.0), path, 0, 10000, std::vector{0.3}, std::vector{1.0});
  EXPECT_NEAR(tv.final_state()[0], std::exp(-1.0), 1e-3);
  EXPECT_NEAR(tv.final_state()[0], std::pow(1.0 - 1e-4, 10000), 1e-12);
}

TEST(DerivativeFlow, MatchesCommonNoiseFiniteDifference) {
  const auto grid = GridSpec::from_dt(kTwoPi, 1e-3);
  const auto k1 = static_cast<std::int64_t>(std::round(1.0 / grid.dt()));
  proptest::Gen gen(31);
  for (int trial = 0; trial < 10; ++trial) {
    const NoisePath path(gen.word(), 1, grid);
    const double x0 = gen.real(-2, 2);
    const double h = 1e-5;
    const auto tv = derivative_flow(kCubic, path, 0, k1, std::vector{x0}, std::vector{1.0});
    const double fd = (integrate_final(kCubic, path, 0, k1, std::vector{x0 + h})[0] -
                       integrate_final(kCubic, path, 0, k1, std::vector{x0})[0]) /
                      h;
    const double exact = tv.final_state()[0];
    EXPECT_LE(std::abs(fd - exact), 1e-3 * std::abs(exact)) << "x0=" << x0;
  }
}

TEST(DerivativeFlow, NeedsJacobians) {
  SdeModel bare = kCubic;
  bare.drift_jacobian.reset();
  const NoisePath path(1, 1, GridSpec::from_dt(kTwoPi, 1e-2));
  EXPECT_THROW(derivative_flow(bare, path, 0, 10, std::vector{0.0}, std::vector{1.0}),
               CapabilityError);
}

TEST(Integrate, StrongErrorHalvesWithDt) {
  // Reference: the same Brownian path on a 64x finer grid.
  const auto model = linear_sine();
  const GridSpec fine(kTwoPi, 64000);
  double err_coarse = 0.0;
  double err_half = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const NoisePath path(seed, 1, fine);
    const double ref = integrate_final(model, path, 0, 64000, std::vector{1.0})[0];
    const auto c = path.coarsened(128);
    const auto h = path.coarsened(64);
    err_coarse += std::abs(integrate_final(model, c, 0, 500, std::vector{1.0})[0] - ref);
    err_half += std::abs(integrate_final(model, h, 0, 1000, std::vector{1.0})[0] - ref);
  }
  const double ratio = err_coarse / err_half;
  EXPECT_GE(ratio, 1.6);
  EXPECT_LE(ratio, 2.4);
}

TEST(Integrate, TrajectoryCsvSchema) {
  const NoisePath path(1, 1, GridSpec(1.0, 4));
  const auto tr = integrate(unit_rate(0.0), path, 0, 4, std::vector{1.0});
  const auto csv = trajectory_csv(tr).to_string();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x1");
  EXPECT_NE(csv.find("0.25,0.75\n"), std::string::npos);
}

TEST(Scheme, NamesRoundTrip) {
  EXPECT_EQ(scheme_from_string(to_string(Scheme::milstein)), Scheme::milstein);
  EXPECT_EQ(scheme_from_string("euler"), Scheme::euler);
  EXPECT_THROW(scheme_from_string("rk4"), InvalidArgument);
}
