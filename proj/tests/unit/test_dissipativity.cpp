#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "rpsde/dissipativity.hpp"
#include "rpsde/error.hpp"

using namespace rpsde;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SdeModel linear_sine() {
  LinearPeriodicSpec spec;
  spec.alpha = TrigPoly{1.0, {0.5}, {}, 1.0};
  return build_linear_periodic(spec);
}

SdeModel anti_model() {
  LinearPeriodicSpec spec;
  spec.alpha = TrigPoly{-1.0, {}, {}, 1.0};
  spec.period = kTwoPi;
  return build_linear_periodic(spec);
}

// Multiplicative noise so the diffusion term of the generator is nonzero.
SdeModel geometric_noise() {
  PolynomialModelSpec spec;
  spec.noise_dim = 2;
  spec.period = kTwoPi;
  spec.drift = {{PolyTerm{TrigPoly{-2.0, {0.5}, {}, 1.0}, {1}}}};
  spec.diffusion = {{PolyTerm{TrigPoly{0.5, {}, {0.2}, 1.0}, {1}}},
                    {PolyTerm{TrigPoly{1.0, {}, {}, 1.0}, {0}}}};
  return build_polynomial(spec);
}

const SdeModel kCubic = build_cubic_scalar({0.5, 1.0});

double generator_p2(const SdeModel& model, double t, double x, double y) {
  const auto fx = model.eval_drift(t, std::vector{x});
  const auto fy = model.eval_drift(t, std::vector{y});
  const auto sx = model.eval_diffusion(t, std::vector{x});
  const auto sy = model.eval_diffusion(t, std::vector{y});
  double out = 2.0 * (x - y) * (fx[0] - fy[0]);
  for (std::size_t k = 0; k < sx.size(); ++k) out += (sx[k] - sy[k]) * (sx[k] - sy[k]);
  return out;
}

}  // namespace

TEST(TwoPointGenerator, Examples) {
  const auto v = quadratic_lyapunov(2.0);
  const SdeModel unit = build_linear_periodic({});
  EXPECT_NEAR(two_point_generator(unit, v, 0.3, std::vector{2.0}, std::vector{0.0}), -8.0, 1e-12);
  EXPECT_NEAR(two_point_generator(kCubic, v, 0.0, std::vector{1.0}, std::vector{0.0}), -4.0, 1e-12);
  EXPECT_EQ(two_point_generator(kCubic, v, 1.0, std::vector{0.7}, std::vector{0.7}), 0.0);
}

TEST(TwoPointGenerator, SingularBelowQuadratic) {
  const auto v = quadratic_lyapunov(1.5);
  EXPECT_THROW(two_point_generator(kCubic, v, 0.0, std::vector{1.0}, std::vector{1.0}),
               SingularityError);
  EXPECT_NO_THROW(two_point_generator(kCubic, v, 0.0, std::vector{1.0}, std::vector{0.5}));
}

TEST(TwoPointGenerator, MatchesQuadraticSpecialization) {
  const auto v = quadratic_lyapunov(2.0);
  proptest::Gen gen(17);
  for (const SdeModel& model : {kCubic, linear_sine(), geometric_noise(), anti_model()}) {
    for (int trial = 0; trial < 200; ++trial) {
      const double t = gen.real(-10.0, 10.0);
      const double x = gen.real(-4.0, 4.0);
      const double y = gen.real(-4.0, 4.0);
      const double got = two_point_generator(model, v, t, std::vector{x}, std::vector{y});
      ASSERT_NEAR(got, generator_p2(model, t, x, y), 1e-10 * (1.0 + std::abs(got)))
          << model.id;
    }
  }
}

TEST(TwoPointGenerator, HigherPowerUsesHessian) {
  // V = |z|^4: V_x = 4 z^3, H = 12 z^2, so L2 V = 4 z^3 df + 6 z^2 ds^2.
  const auto v = quadratic_lyapunov(4.0);
  const auto model = geometric_noise();
  const double t = 0.9;
  const double x = 1.3;
  const double y = -0.4;
  const double z = x - y;
  const double df = model.eval_drift(t, std::vector{x})[0] - model.eval_drift(t, std::vector{y})[0];
  const auto sx = model.eval_diffusion(t, std::vector{x});
  const auto sy = model.eval_diffusion(t, std::vector{y});
  double ds2 = 0.0;
  for (std::size_t k = 0; k < sx.size(); ++k) ds2 += (sx[k] - sy[k]) * (sx[k] - sy[k]);
  EXPECT_NEAR(two_point_generator(model, v, t, std::vector{x}, std::vector{y}),
              4.0 * z * z * z * df + 6.0 * z * z * ds2, 1e-10);
}

TEST(SamplePairs, ScalarDesignCoversGridAndDiagonal) {
  SampleSpec spec;
  spec.n_points = 5;
  const auto pairs = sample_pairs(spec, 1);
  EXPECT_EQ(pairs.size(), 2u * (10u + 5u));
  for (std::size_t i = 0; i < pairs.size(); i += 2) {
    EXPECT_NE(pairs[i], pairs[i + 1]);
    EXPECT_LE(std::abs(pairs[i]), spec.box_radius + 1e-6);
  }
  EXPECT_EQ(sample_pairs(spec, 1), pairs);
}

TEST(SamplePairs, VectorDesignIsDeterministic) {
  SampleSpec spec;
  spec.n_points = 6;
  const auto a = sample_pairs(spec, 3);
  EXPECT_EQ(a.size() % 6u, 0u);
  EXPECT_EQ(a, sample_pairs(spec, 3));
  spec.seed = 8;
  EXPECT_NE(a, sample_pairs(spec, 3));
}

TEST(GeneratorBound, CubicPasses) {
  auto v = quadratic_lyapunov(2.0);
  v.lambda_rate = [](double t) { return 2.0 * (-1.0 + 0.5 * std::sin(t)); };
  const auto r = check_generator_bound(kCubic, v, {});
  EXPECT_GE(r.samples, 10000u);
  EXPECT_TRUE(r.pass) << r.max_margin;
  EXPECT_FALSE(r.note.empty());
}

TEST(GeneratorBound, AntiModelFails) {
  auto v = quadratic_lyapunov(2.0);
  v.lambda_rate = [](double) { return -1.0; };
  const auto r = check_generator_bound(anti_model(), v, {});
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.max_margin, 0.0);
  const double z = r.worst_x[0] - r.worst_y[0];
  EXPECT_NEAR(r.max_margin, 3.0 * z * z, 1e-9 * (1.0 + r.max_margin));
}

TEST(GeneratorBound, LinearEqualityCase) {
  auto v = quadratic_lyapunov(2.0);
  v.lambda_rate = [](double t) { return -2.0 * (1.0 + 0.5 * std::sin(t)); };
  const auto r = check_generator_bound(linear_sine(), v, {});
  EXPECT_LE(r.max_margin, 1e-12 * 100.0);
  EXPECT_TRUE(r.pass);
}

TEST(GeneratorBound, NeedsRate) {
  EXPECT_THROW(check_generator_bound(kCubic, quadratic_lyapunov(2.0), {}), InvalidArgument);
}

TEST(DriftConditions, LinearBetaIsMinusAlpha) {
  const auto r = check_drift_conditions(linear_sine(), {});
  ASSERT_EQ(r.times.size(), r.beta_profile.size());
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    // Near-diagonal pairs carry rounding of order eps |x| / |x - y|.
    EXPECT_NEAR(r.beta_profile[i], -(1.0 + 0.5 * std::sin(r.times[i])), 1e-8);
    EXPECT_NEAR(r.lip_profile[i], 0.0, 1e-12);
  }
  EXPECT_NEAR(r.integral_beta, -kTwoPi, 1e-6);
  EXPECT_TRUE(r.pass);
}

TEST(DriftConditions, AntiModelFails) {
  const auto r = check_drift_conditions(anti_model(), {});
  EXPECT_NEAR(r.integral_beta, kTwoPi, 1e-6);
  EXPECT_FALSE(r.pass);
}

TEST(DriftConditions, CubicBetaBelowLinearPart) {
  const auto r = check_drift_conditions(kCubic, {});
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    EXPECT_LE(r.beta_profile[i], -1.0 + 0.5 * std::sin(r.times[i]) + 1e-6);
  }
  EXPECT_LE(r.integral_beta, -kTwoPi + 1e-3);
  EXPECT_TRUE(r.pass);
}

TEST(DriftConditions, IndependentOfWorkers) {
  const auto a = check_drift_conditions(geometric_noise(), {}, {1});
  const auto b = check_drift_conditions(geometric_noise(), {}, {4});
  EXPECT_EQ(a.beta_profile, b.beta_profile);
  EXPECT_EQ(a.lip_profile, b.lip_profile);
  EXPECT_EQ(a.integral_beta, b.integral_beta);
}

TEST(DriftConditions, AgreesWithGeneratorBound) {
  // With lambda built from the sampled profiles the generator bound holds at
  // every sample, and the integral test on lambda / 2 reproduces the verdict.
  for (const SdeModel& model : {kCubic, linear_sine(), geometric_noise(), anti_model()}) {
    const auto cond = check_drift_conditions(model, {});
    auto v = quadratic_lyapunov(2.0);
    v.lambda_rate = lambda_from_conditions(cond, model.period, 2.0, model.noise_dim);
    const auto bound = check_generator_bound(model, v, {});
    EXPECT_TRUE(bound.pass) << model.id << " " << bound.max_margin;
    EXPECT_EQ(cond.pass, cond.integral_beta < 0.0) << model.id;
    double lip_mass = 0.0;
    for (double l : cond.lip_profile) lip_mass += l;
    if (lip_mass == 0.0) {
      double integral = 0.0;
      for (std::size_t i = 1; i < cond.times.size(); ++i) {
        integral += 0.5 * (cond.times[i] - cond.times[i - 1]) *
                    (v.lambda_rate(cond.times[i]) + v.lambda_rate(cond.times[i - 1]));
      }
      EXPECT_EQ(integral < 0.0, cond.pass) << model.id;
    }
  }
}

TEST(DriftConditions, LambdaInterpolatesNodes) {
  const auto cond = check_drift_conditions(geometric_noise(), {});
  const auto lambda = lambda_from_conditions(cond, kTwoPi, 2.0, 2);
  for (std::size_t i = 0; i < cond.times.size(); i += 7) {
    const double l = cond.lip_profile[i];
    EXPECT_NEAR(lambda(cond.times[i]), 2.0 * cond.beta_profile[i] + 2.0 * l * l, 1e-12);
    EXPECT_NEAR(lambda(cond.times[i] + kTwoPi), lambda(cond.times[i]), 1e-9);
  }
}

TEST(Contraction, LinearSlopeIsDeterministic) {
  const auto grid = GridSpec::from_dt(kTwoPi, 1e-2);
  const NoisePath path(5, 1, grid);
  // Short horizon: the gap must stay well above the rounding of x and y.
  const auto r = contraction_report(linear_sine(), path, 0, 2, std::vector{1.0},
                                    std::vector{-1.0});
  ASSERT_EQ(r.log_gaps.size(), 3u);
  // Euler on a linear gap gives prod (1 - alpha_k dt); compare with that exactly.
  double expected = 0.0;
  for (std::int64_t k = 0; k < grid.steps_per_period(); ++k) {
    expected += std::log1p(-(1.0 + 0.5 * std::sin(grid.phase_time(k))) * grid.dt());
  }
  EXPECT_NEAR(r.slope, expected / kTwoPi, 1e-7);
  EXPECT_NEAR(r.slope, -1.0, 1e-2);
  EXPECT_EQ(r.implied_exponent, r.slope);
  EXPECT_FALSE(r.truncated);
}

TEST(Contraction, LinearSlopeConvergesInDt) {
  const auto grid = GridSpec::from_dt(kTwoPi, 1e-5);
  const NoisePath path(5, 1, grid);
  const auto r = contraction_report(linear_sine(), path, 0, 1, std::vector{1.0},
                                    std::vector{-1.0});
  EXPECT_NEAR(r.slope, -1.0, 1e-4);
}

TEST(Contraction, EqualStartsRejected) {
  const NoisePath path(1, 1, GridSpec::from_dt(kTwoPi, 1e-2));
  EXPECT_THROW(contraction_report(kCubic, path, 0, 2, std::vector{1.0}, std::vector{1.0}),
               InvalidArgument);
}

TEST(Contraction, CubicMeanSlope) {
  const auto grid = GridSpec::from_dt(kTwoPi, 1e-2);
  double total = 0.0;
  const int seeds = 50;
  for (const auto& path : ensemble(99, seeds, 1, grid)) {
    const auto r = contraction_report(kCubic, path, 0, 20, std::vector{2.0}, std::vector{-2.0});
    total += r.slope;
  }
  EXPECT_LE(total / seeds, -0.95);
}

TEST(Contraction, SlopeBoundedByDriftIntegral) {
  const auto grid = GridSpec::from_dt(kTwoPi, 1e-2);
  for (const SdeModel& model : {kCubic, linear_sine(), geometric_noise()}) {
    const auto cond = check_drift_conditions(model, {});
    ASSERT_TRUE(cond.pass) << model.id;
    const double bound = cond.integral_beta / (2.0 * model.period) + 0.1;
    for (const auto& path : ensemble(3, 50, model.m(), grid)) {
      const auto r = contraction_report(model, path, 0, 5, std::vector{1.0}, std::vector{0.0});
      EXPECT_LE(r.slope, bound) << model.id << " seed " << path.seed();
    }
  }
}

TEST(Contraction, CollapseTruncates) {
  // Deterministic strong contraction drives the gap below the smallest double.
  LinearPeriodicSpec spec;
  spec.alpha = TrigPoly{50.0, {}, {}, 1.0};
  spec.period = 1.0;
  spec.noise_scale = 0.0;
  const auto model = build_linear_periodic(spec);
  const NoisePath path(1, 1, GridSpec(1.0, 100));
  const auto r = contraction_report(model, path, 0, 40, std::vector{1.0}, std::vector{0.0});
  EXPECT_TRUE(r.truncated);
  EXPECT_LT(r.log_gaps.size(), 41u);
  for (double g : r.log_gaps) EXPECT_TRUE(std::isfinite(g));
}

TEST(Tempered, RunningMaxIsFiniteAndWorkerInvariant) {
  const auto grid = GridSpec::from_dt(kTwoPi, 1e-2);
  const auto v = quadratic_lyapunov(2.0);
  const auto a = tempered_running_max(kCubic, grid, 4, 40, 0, 5 * grid.steps_per_period(),
                                      std::vector{1.0}, v, {1});
  const auto b = tempered_running_max(kCubic, grid, 4, 40, 0, 5 * grid.steps_per_period(),
                                      std::vector{1.0}, v, {3});
  EXPECT_TRUE(std::isfinite(a.value));
  EXPECT_NEAR(a.value, b.value, 1e-12);
}

TEST(DissipativityCsv, Schemas) {
  const auto cond = check_drift_conditions(linear_sine(), {});
  const auto table = condition_report_csv(cond);
  EXPECT_EQ(table.header(), (std::vector<std::string>{"t", "beta", "L"}));
  EXPECT_EQ(table.rows(), cond.times.size());
  const NoisePath path(1, 1, GridSpec::from_dt(kTwoPi, 1e-2));
  const auto r = contraction_report(linear_sine(), path, 0, 3, std::vector{1.0},
                                    std::vector{0.0});
  EXPECT_EQ(contraction_report_csv(r).header(), (std::vector<std::string>{"t", "log_gap"}));
  EXPECT_EQ(contraction_report_csv(r).rows(), 4u);
}
