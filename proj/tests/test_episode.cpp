#include <gtest/gtest.h>

#include <vector>

#include "snakecpg/episode.hpp"

using namespace snakecpg;
using namespace snakecpg::env;

TEST(JamDetector, Examples) {
  const double dt = 1e-3;
  EXPECT_TRUE(jam_detector(std::vector<double>(300, 0.01), dt));
  EXPECT_FALSE(jam_detector(std::vector<double>(1000, 0.5), dt));
  std::vector<double> dip(299, 0.01);
  dip.push_back(0.5);
  EXPECT_FALSE(jam_detector(dip, dt));
  EXPECT_FALSE(jam_detector(std::vector<double>(299, 0.01), dt));
}

TEST(JamDetector, Validation) {
  EXPECT_THROW(JamTracker(JamParams{0.0, 0.3}), std::invalid_argument);
  EXPECT_THROW(JamTracker(JamParams{0.02, 0.0}), std::invalid_argument);
}

TEST(JamTracker, CountsWholeRunOnceJammed) {
  JamTracker t;
  for (int k = 0; k < 5; ++k) t.update(0.0, 0.05);
  EXPECT_EQ(t.jam_time(), 0.0);
  t.update(0.0, 0.05);  // 0.3 s reached
  EXPECT_NEAR(t.jam_time(), 0.3, 1e-12);
  t.update(0.0, 0.05);
  EXPECT_NEAR(t.jam_time(), 0.35, 1e-12);
  t.update(1.0, 0.05);
  for (int k = 0; k < 4; ++k) t.update(0.0, 0.05);
  EXPECT_NEAR(t.jam_time(), 0.35, 1e-12);
}

TEST(EpisodeStatus, GoalReachedImmediately) {
  const std::vector<Vec2> heads{{0.5, 0}, {0.95, 0}}, vel{{1, 0}, {1, 0}};
  EXPECT_EQ(episode_status(heads, vel, {1, 0}, 0.05), EpisodeStatus::kGoalReached);
}

TEST(EpisodeStatus, MissedGoalAfterSixtySteps) {
  std::vector<Vec2> heads, vel;
  for (int k = 0; k < 59; ++k) {
    heads.push_back({-0.01 * k, 0});
    vel.push_back({-0.2, 0});
  }
  EXPECT_EQ(episode_status(heads, vel, {1, 0}, 0.05), EpisodeStatus::kRunning);
  heads.push_back({-0.6, 0});
  vel.push_back({-0.2, 0});
  EXPECT_EQ(episode_status(heads, vel, {1, 0}, 0.05), EpisodeStatus::kMissedGoal);
}

TEST(EpisodeStatus, RecedingRunResets) {
  std::vector<Vec2> heads, vel;
  for (int k = 0; k < 100; ++k) {
    heads.push_back({0, 0});
    vel.push_back({k % 50 == 49 ? 0.2 : -0.2, 0});
  }
  EXPECT_EQ(episode_status(heads, vel, {1, 0}, 0.05), EpisodeStatus::kRunning);
}

TEST(EpisodeStatus, StarvedAfterNineHundredMs) {
  std::vector<Vec2> heads, vel;
  for (int k = 0; k < 17; ++k) {
    heads.push_back({0, 0});
    vel.push_back({0, 0.001});
  }
  EXPECT_EQ(episode_status(heads, vel, {1, 0}, 0.05), EpisodeStatus::kRunning);
  heads.push_back({0, 0});
  vel.push_back({0, 0.001});
  EXPECT_EQ(episode_status(heads, vel, {1, 0}, 0.05), EpisodeStatus::kStarved);
}

TEST(EpisodeStatus, Absorbing) {
  EpisodeMonitor m({1, 0});
  EXPECT_EQ(m.update({0.95, 0}, {1, 0}, 0.05), EpisodeStatus::kGoalReached);
  EXPECT_EQ(m.update({0, 0}, {-1, 0}, 0.05), EpisodeStatus::kGoalReached);
  EXPECT_NEAR(m.elapsed(), 0.05, 1e-15);
}

TEST(EpisodeStatus, Errors) {
  EXPECT_THROW(episode_status({}, {}, {1, 0}, 0.05), std::invalid_argument);
}
