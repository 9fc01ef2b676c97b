#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ave/errors.hpp"
#include "ave/pendulum.hpp"

namespace ave::pendulum {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(WrapAngle, MapsIntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), -kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), -kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi + 0.5), -kPi + 0.5, 1e-12);
  for (double th = -20.0; th < 20.0; th += 0.37) {
    const double w = wrap_angle(th);
    EXPECT_GE(w, -kPi);
    EXPECT_LT(w, kPi);
    EXPECT_NEAR(std::remainder(w - th, 2 * kPi), 0.0, 1e-9);
  }
}

TEST(PendulumStep, ConservesEnergyWithoutTorque) {
  const PendulumParams p;
  PendulumState s{1.0, 0.0};
  const double e0 = energy(s, p);
  for (int i = 0; i < 2000; ++i) s = pendulum_step(s, 0.0, p);
  EXPECT_NEAR(energy(s, p), e0, 1e-4 * std::abs(e0));
}

TEST(PendulumStep, RestStatesStayPut) {
  const PendulumParams p;
  PendulumState down{0.0, 0.0};
  for (int i = 0; i < 100; ++i) down = pendulum_step(down, 0.0, p);
  EXPECT_EQ(down, (PendulumState{0.0, 0.0}));
}

TEST(PendulumStep, TorqueAboveLimitThrows) {
  const PendulumParams p;
  EXPECT_THROW(pendulum_step({0.0, 0.0}, 1.01 * p.torque_limit(), p), ContractViolation);
}

TEST(Separatrix, EnergyOfUprightRest) {
  const PendulumParams p;
  EXPECT_DOUBLE_EQ(separatrix_energy(p), p.mass * p.gravity * p.length);
  EXPECT_DOUBLE_EQ(energy({kPi, 0.0}, p), separatrix_energy(p));
  // the bottom crossing of the separatrix
  const double w = 2.0 * std::sqrt(p.gravity / p.length);
  EXPECT_NEAR(energy({0.0, w}, p), separatrix_energy(p), 1e-12);
}

TEST(PendulumEnv, MirroredTrajectoriesReflect) {
  const PendulumParams p;
  const PendulumEnv env(p), mirror(p, true);
  PendulumState a{0.4, -0.3}, b{-0.4, 0.3};
  SeededRng ra(9), rb(9);
  for (int i = 0; i < 300; ++i) {
    a = env.step(a, env.sample_action(a, ra)).next_state;
    b = mirror.step(b, mirror.sample_action(b, rb)).next_state;
    ASSERT_NEAR(a.theta, -b.theta, 1e-9);
    ASSERT_NEAR(a.omega, -b.omega, 1e-9);
  }
}

TEST(PendulumEnv, Features) {
  const PendulumEnv env(PendulumParams{});
  EXPECT_EQ(env.features({0.5, 1.0}, FeatureSelector::phase), (std::vector<double>{0.5, 1.0}));
  const auto e = env.features({0.0, 1.0}, FeatureSelector::phase_embedding);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_DOUBLE_EQ(e[0], 1.0);
  EXPECT_THROW(env.features({0.0, 0.0}, FeatureSelector::position), ConfigError);
}

TEST(PendulumParams, ValidateRejectsCoarseStep) {
  PendulumParams p;
  p.dt = 0.1;
  EXPECT_THROW(p.validate(), ConfigError);
}

}  // namespace
}  // namespace ave::pendulum
