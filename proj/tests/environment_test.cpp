#include <gtest/gtest.h>

#include <random>

#include "nashseek/environment.hpp"
#include "oracles.hpp"

using namespace nashseek;

namespace {

Environment sensor_env(int varsigma) {
  return make_environment(varsigma, graded_sinusoids(5, 2),
                          varsigma ? "sensor_coupling" : "none");
}

}  // namespace

TEST(PlantDerivative, NominalIntegrator) {
  const Environment env = make_environment(0, std::vector<DisturbanceSignal>(5, DisturbanceSignal::zero(2)));
  const Vector u = Vector::LinSpaced(10, -3, 3);
  EXPECT_EQ(plant_derivative(env, Vector::Ones(10), u, 4.0), u);
}

TEST(PlantDerivative, SinusoidsVanishAtZero) {
  EXPECT_EQ(plant_derivative(sensor_env(0), Vector::Ones(10), Vector::Zero(10), 0.0),
            Vector::Zero(10));
}

TEST(PlantDerivative, RejectsMismatchedControl) {
  EXPECT_THROW(plant_derivative(sensor_env(0), Vector::Zero(10), Vector::Zero(8), 0.0),
               std::invalid_argument);
}

TEST(ExtendedState, DisturbanceOnlyWhenVarsigmaZero) {
  const Environment env = sensor_env(0);
  const double t = 0.7;
  const Vector z = extended_state(env, Vector::Constant(10, 9.0), t);
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 2; ++k) EXPECT_EQ(z(2 * i + k), (i + 1) * std::sin((i + 1) * t));
}

TEST(ExtendedState, SensorCouplingTerms) {
  const Environment env = sensor_env(1);
  const Vector z0 = extended_state(env, Vector::Zero(10), M_PI / 2);
  EXPECT_NEAR(z0(0), 1.0, 1e-15);
  EXPECT_NEAR(z0(1), 1.0, 1e-15);

  // x = [x11, x12, x21, x22, ...]
  const Vector x = Vector::LinSpaced(10, 1, 10);
  const Vector z = extended_state(env, x, 0.0);
  EXPECT_EQ(z.segment(0, 2), (Vector{{3.0, 4.0}}));
  EXPECT_EQ(z.segment(2, 2), (Vector{{1.0 + 5.0, 4.0}}));
  for (int i = 2; i < 5; ++i) EXPECT_EQ(z.segment(2 * i, 2), x.segment(2 * i, 2));
}

TEST(ExtendedState, ZeroEverything) {
  const Environment env = make_environment(1, std::vector<DisturbanceSignal>(3, DisturbanceSignal::zero(1)));
  EXPECT_EQ(extended_state(env, Vector::Ones(3), 2.0), Vector::Zero(3));
}

TEST(BetaLowerBound, SinglePlayerSinusoid) {
  const double a = 3.0, w = 2.0, c = 4.0;
  const Environment env = make_environment(0, {DisturbanceSignal::sinusoid(1, a, w)});
  EXPECT_DOUBLE_EQ(beta_lower_bound(env, Vector{{c}}), a * w + a * w * w / c);
}

TEST(BetaLowerBound, ZeroDisturbance) {
  const Environment env = make_environment(0, std::vector<DisturbanceSignal>(4, DisturbanceSignal::zero(2)));
  EXPECT_EQ(beta_lower_bound(env, Vector::Constant(4, 3.0)), 0.0);
}

TEST(BetaLowerBound, GradedSinusoidsClosedForm) {
  const Environment env = make_environment(0, graded_sinusoids(5, 1));
  for (double c : {1.0, 2.0, 10.0, 50.0}) {
    const double expect = oracle::power_sum(5, 2) + oracle::power_sum(5, 3) / c;
    EXPECT_EQ(expect, 55.0 + 225.0 / c);
    EXPECT_EQ(beta_lower_bound(env, Vector::Constant(5, c)), expect);
  }
}

TEST(BetaLowerBound, NonUniformGains) {
  const Environment env = make_environment(0, graded_sinusoids(5, 1));
  const Vector c{{1.0, 2.0, 3.0, 4.0, 5.0}};
  EXPECT_DOUBLE_EQ(beta_lower_bound(env, c), 5.0 * 55.0 + 225.0);
}

TEST(BetaLowerBound, RequiresSecondDerivativeBound) {
  auto d = graded_sinusoids(2, 1);
  d[1].sup_deriv2_l1.reset();
  const Environment env = make_environment(0, d);
  EXPECT_THROW(beta_lower_bound(env, Vector::Ones(2)), std::invalid_argument);
  EXPECT_THROW(beta_lower_bound(make_environment(0, graded_sinusoids(2, 1)), Vector::Zero(2)),
               std::invalid_argument);
}

TEST(Environment, RejectsInconsistentInput) {
  EXPECT_THROW(make_environment(2, graded_sinusoids(2, 1)), std::invalid_argument);
  EXPECT_THROW(make_environment(1, graded_sinusoids(3, 2), "sensor_coupling"),
               std::invalid_argument);
  EXPECT_THROW(make_environment(1, graded_sinusoids(5, 2), "mystery"), std::invalid_argument);
  auto mixed = graded_sinusoids(2, 2);
  mixed[1] = DisturbanceSignal::zero(1);
  EXPECT_THROW(make_environment(0, mixed), std::invalid_argument);
  EXPECT_THROW(extended_state(sensor_env(0), Vector::Zero(7), 0.0), std::invalid_argument);
}

TEST(EnvironmentProperty, LinearInControl) {
  std::mt19937 rng(4);
  const Environment env = sensor_env(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = oracle::random_point(10, -10, 10, rng);
    const Vector u = oracle::random_point(10, -10, 10, rng);
    const double t = 20.0 * trial / 50.0;
    const Vector diff = plant_derivative(env, x, u, t) - plant_derivative(env, x, Vector::Zero(10), t);
    EXPECT_LE((diff - u).lpNorm<Eigen::Infinity>(), 1e-12 * (1.0 + u.lpNorm<Eigen::Infinity>()));
  }
}

TEST(EnvironmentProperty, VarsigmaZeroIgnoresAction) {
  std::mt19937 rng(6);
  const Environment env = sensor_env(0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector u = oracle::random_point(10, -5, 5, rng);
    const Vector x1 = oracle::random_point(10, -10, 10, rng);
    const Vector x2 = oracle::random_point(10, -10, 10, rng);
    const double t = 0.37 * trial;
    EXPECT_EQ(plant_derivative(env, x1, u, t) - u, plant_derivative(env, x2, u, t) - u);
  }
}

TEST(EnvironmentProperty, DerivativesMatchStencil) {
  for (const auto& d : graded_sinusoids(5, 2)) {
    for (int k = 0; k <= 2000; ++k) {
      const double t = 0.01 * k;
      const Vector fd1 = oracle::stencil5([&](double s) { return d.value(s); }, t, 1e-3);
      const Vector fd2 = oracle::stencil5([&](double s) { return d.deriv(s); }, t, 1e-3);
      EXPECT_LE((fd1 - d.deriv(t)).lpNorm<Eigen::Infinity>(), 1e-8) << "t=" << t;
      EXPECT_LE((fd2 - d.deriv2(t)).lpNorm<Eigen::Infinity>(), 1e-8 * d.frequency) << "t=" << t;
    }
  }
}

TEST(EnvironmentProperty, SupBoundsDominateSamples) {
  for (const auto& d : graded_sinusoids(5, 2)) {
    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k <= 20000; ++k) {
      const double t = 1e-3 * k;
      s1 = std::max(s1, d.deriv(t).lpNorm<1>());
      s2 = std::max(s2, d.deriv2(t).lpNorm<1>());
    }
    EXPECT_LE(s1, d.sup_deriv_l1);
    EXPECT_LE(s2, *d.sup_deriv2_l1);
    EXPECT_GT(s1, 0.999 * d.sup_deriv_l1);
    EXPECT_GT(s2, 0.999 * *d.sup_deriv2_l1);
  }
}
