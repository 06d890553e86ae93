#include <gtest/gtest.h>

#include <random>

#include "snakecpg/sensing.hpp"

using namespace snakecpg;
using namespace snakecpg::env;

namespace {

SensorReadings zeros() { return SensorReadings(kNumBodies, {0, 0, 0, 0}); }

RobotState straight_at(Vec2 p, double heading) { return make_state(RobotConfig{}, {p, heading}); }

}  // namespace

TEST(SenseContacts, Substitution) {
  auto r = zeros();
  r[0][kB] = 2.0;
  r[0][kC] = 0.5;
  const auto f = sense_contacts(r);
  EXPECT_DOUBLE_EQ(f[0], 1.5);
  for (std::size_t i = 1; i < kForceDim; ++i) EXPECT_EQ(f[i], 0.0);
}

TEST(SenseContacts, AllZero) {
  for (double v : sense_contacts(zeros())) EXPECT_EQ(v, 0.0);
}

TEST(SenseContacts, Errors) {
  auto r = zeros();
  r[3][kD] = -0.1;
  EXPECT_THROW(sense_contacts(r), std::invalid_argument);
  EXPECT_THROW(sense_contacts(SensorReadings(4, {0, 0, 0, 0})), std::invalid_argument);
}

TEST(SenseContacts, DiagonalSwapNegatesExactly) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(0, 5);
  for (int k = 0; k < 1000; ++k) {
    auto r = zeros();
    for (auto& body : r)
      for (auto& s : body) s = d(rng);
    const auto f = sense_contacts(r);
    const std::size_t i = k % kNumBodies;
    auto bc = r, ad = r;
    std::swap(bc[i][kB], bc[i][kC]);
    std::swap(ad[i][kA], ad[i][kD]);
    const auto fb = sense_contacts(bc), fa = sense_contacts(ad);
    for (std::size_t j = 0; j < kForceDim; ++j) {
      EXPECT_EQ(fb[j], j == 2 * i ? -f[j] : f[j]);
      EXPECT_EQ(fa[j], j == 2 * i + 1 ? -f[j] : f[j]);
    }
  }
}

TEST(NearestObstacle, Examples) {
  const auto st = straight_at({0, 0}, 0.0);
  const std::vector<Obstacle> one{{{1, 0}, 0.2}};
  const auto n = nearest_obstacle(st, one);
  EXPECT_NEAR(n.distance, 0.8, 1e-15);
  EXPECT_NEAR(n.bearing, 0.0, 1e-15);

  const std::vector<Obstacle> two{{{1, 0}, 0.2}, {{0, 0.35}, 0.05}};
  const auto m = nearest_obstacle(st, two);
  EXPECT_NEAR(m.distance, 0.3, 1e-15);
  EXPECT_NEAR(m.bearing, std::numbers::pi / 2, 1e-15);

  const auto e = nearest_obstacle(st, {});
  EXPECT_EQ(e.distance, kNoObstacleDistance);
  EXPECT_EQ(e.bearing, 0.0);
}

TEST(NearestObstacle, HeadFrameAndClamp) {
  const auto st = straight_at({0, 0}, std::numbers::pi / 2);
  const std::vector<Obstacle> ob{{{1, 0}, 0.2}};
  EXPECT_NEAR(nearest_obstacle(st, ob).bearing, -std::numbers::pi / 2, 1e-15);
  const std::vector<Obstacle> inside{{{0.01, 0}, 0.2}};
  EXPECT_EQ(nearest_obstacle(st, inside).distance, 0.0);
}

TEST(Observe, Layout) {
  const auto st = make_state(RobotConfig{}, {{0.2, 0.1}, 0.0}, {1, -2, 3, -4});
  PreviousDecision dec;
  dec.action = {0.1, 0.2, 0.3, 0.4};
  dec.option = 0.5;
  dec.beta = 0.25;
  ContactForceVector f{};
  for (std::size_t i = 0; i < kForceDim; ++i) f[i] = 0.1 * static_cast<double>(i) - 0.3;
  const NearestObstacle near{0.42, -0.7};
  const Vec2 goal{1.2, 0.1};
  const auto z = observe(st, goal, std::nullopt, 0.05, dec, f, near);
  ASSERT_EQ(z.size(), 26u);
  const auto g = goal_polar(st, goal);
  EXPECT_EQ(z[obs::kRhoGoal], g.rho);
  EXPECT_EQ(z[obs::kRhoGoalRate], 0.0);
  EXPECT_EQ(z[obs::kThetaGoal], g.theta);
  EXPECT_EQ(z[obs::kThetaGoalRate], 0.0);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(z[obs::kKappa + i], st.kappa[i]);
    EXPECT_EQ(z[obs::kPrevAction + i], dec.action[i]);
  }
  EXPECT_EQ(z[obs::kPrevOption], 0.5);
  EXPECT_EQ(z[obs::kPrevBeta], 0.25);
  for (std::size_t i = 0; i < kForceDim; ++i) EXPECT_EQ(z[obs::kForce + i], f[i]);
  EXPECT_EQ(z[obs::kObstacleDistance], 0.42);
  EXPECT_EQ(z[obs::kObstacleBearing], -0.7);
}

TEST(Observe, RatesAndGoal) {
  const auto st = straight_at({1.0, 0.0}, 0.0);
  GoalPolar prev{0.5, 0.1};
  const auto z = observe(st, {1.0, 0.0}, prev, 0.05, {}, {}, {});
  EXPECT_EQ(z[obs::kRhoGoal], 0.0);
  EXPECT_NEAR(z[obs::kRhoGoalRate], -10.0, 1e-12);
  EXPECT_NEAR(z[obs::kThetaGoalRate], -2.0, 1e-12);
}

TEST(EventTrigger, Examples) {
  const double D = 0.15;
  ContactForceVector f{};
  EXPECT_FALSE(event_trigger(f, 2 * D, D));
  EXPECT_TRUE(event_trigger(f, 0.5 * D, D));
  f[0] = 0.1;
  EXPECT_TRUE(event_trigger(f, 10 * D, D));
  EXPECT_THROW(event_trigger(f, 1.0, 0.0), std::invalid_argument);
}
