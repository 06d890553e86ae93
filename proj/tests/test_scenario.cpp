#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "snakecpg/scenario.hpp"

using namespace snakecpg;
using namespace snakecpg::bench;

namespace {

// Grid point (r, c) of a spec, noise-free.
Vec2 grid_point(const MazeSpec& s, std::size_t r, std::size_t c) {
  const Vec2 mid{s.goal_distance / 2, 0};
  return mid + Vec2{(r - 0.5 * (s.rows - 1.0)) * s.spacing, (c - 0.5 * (s.cols - 1.0)) * s.spacing};
}

void expect_equal(const Scenario& a, const Scenario& b) {
  ASSERT_EQ(a.obstacles.size(), b.obstacles.size());
  for (std::size_t k = 0; k < a.obstacles.size(); ++k) {
    EXPECT_EQ(a.obstacles[k].center, b.obstacles[k].center);
    EXPECT_EQ(a.obstacles[k].radius, b.obstacles[k].radius);
  }
  EXPECT_EQ(a.goal, b.goal);
  EXPECT_EQ(a.spawn.position, b.spawn.position);
  EXPECT_EQ(a.spawn.heading, b.spawn.heading);
}

}  // namespace

TEST(TrainingScenario, Deterministic) {
  std::mt19937_64 a(42), b(42);
  expect_equal(generate_training_scenario(a), generate_training_scenario(b));
  expect_equal(generate_scenario(training_maze(), 9, {}), generate_scenario(training_maze(), 9, {}));
}

TEST(TrainingScenario, Layout) {
  const auto spec = training_maze();
  const env::RobotConfig robot;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto sc = generate_scenario(spec, seed, robot);
    ASSERT_EQ(sc.obstacles.size(), 9u);
    EXPECT_EQ(norm(sc.goal - sc.spawn.position), 1.5);
    EXPECT_LE(std::abs(sc.spawn.heading), 60.0 * std::numbers::pi / 180.0);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) {
        const Vec2 d = sc.obstacles[r * 3 + c].center - grid_point(spec, r, c);
        EXPECT_LT(std::abs(d.x), 0.01);
        EXPECT_LT(std::abs(d.y), 0.01);
      }
    for (const auto& ob : sc.obstacles) EXPECT_GT(norm(sc.goal - ob.center), ob.radius);
    EXPECT_FALSE(env::overlaps(robot, env::make_state(robot, sc.spawn), sc.obstacles));
  }
}

TEST(TestScenario, Layout) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const auto sc = generate_test_scenario(rng);
    ASSERT_EQ(sc.obstacles.size(), 30u);
    for (const auto& ob : sc.obstacles) EXPECT_EQ(ob.radius, 0.02);
    EXPECT_EQ(norm(sc.goal - sc.spawn.position), 2.0);
    EXPECT_LE(std::abs(sc.spawn.heading), std::numbers::pi / 2);
  }
}

TEST(Scenario, DeviationCoversRangeWithBothSigns) {
  double lo = 1e9, hi = -1e9;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const double h = generate_scenario(test_maze(), seed, {}).spawn.heading;
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  EXPECT_LT(lo, -1.3);
  EXPECT_GT(hi, 1.3);
}

TEST(Scenario, EmptyField) {
  const auto sc = generate_scenario(empty_field(), 3, {});
  EXPECT_TRUE(sc.obstacles.empty());
}

TEST(Scenario, ImpossibleSpawnThrows) {
  MazeSpec m;
  m.goal_distance = 0.1;  // grid sits on top of the spawn
  m.spacing = 0.03;
  m.noise_clip = 0.0;
  EXPECT_THROW(generate_scenario(m, 1, {}), std::runtime_error);
}

TEST(Scenario, Validation) {
  MazeSpec m;
  m.radius = 0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = {};
  m.max_deviation_deg = 200;
  EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(ClippedNoise, WithinBounds) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10000; ++k) {
    const double w = clipped_noise(rng, 0.01);
    EXPECT_GT(w, -0.01);
    EXPECT_LT(w, 0.01);
  }
  EXPECT_EQ(clipped_noise(rng, 0.0), 0.0);
}
