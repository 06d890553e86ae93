#include <gtest/gtest.h>

#include <vector>

#include "snakecpg/task.hpp"

using namespace snakecpg;
using namespace snakecpg::env;

namespace {

JointAction neutral(double k_f = 1.0) {
  JointAction a;
  a.a1.assign(4, 0.0);
  a.k_f = k_f;
  a.command = {cpg::TonicInput::uniform(0.5, 0.5), k_f};
  return a;
}

bench::Scenario fixed(Vec2 goal, std::vector<Obstacle> obs = {}) {
  bench::Scenario sc;
  sc.goal = goal;
  sc.obstacles = std::move(obs);
  sc.spawn = {{0, 0}, 0};
  sc.accept_radius = 0.1;
  return sc;
}

}  // namespace

TEST(SnakeEnv, ResetIsDeterministic) {
  SnakeEnv a(TaskConfig{}, bench::training_maze()), b(TaskConfig{}, bench::training_maze());
  EXPECT_EQ(a.reset(17), b.reset(17));
  for (int k = 0; k < 40; ++k) {
    const auto sa = a.step(neutral()), sb = b.step(neutral());
    ASSERT_EQ(sa.observation, sb.observation);
    ASSERT_EQ(sa.reward, sb.reward);
    if (sa.terminal) break;
  }
}

TEST(SnakeEnv, ObservationWidth) {
  SnakeEnv e(TaskConfig{}, bench::training_maze());
  EXPECT_EQ(e.reset(1).size(), kObservationDim);
  EXPECT_EQ(e.step(neutral()).observation.size(), kObservationDim);
}

TEST(SnakeEnv, FreeFieldNeverTriggers) {
  SnakeEnv e(TaskConfig{}, bench::empty_field());
  e.reset(3);
  EXPECT_FALSE(e.event_active());
  for (int k = 0; k < 200; ++k) {
    const auto s = e.step(neutral(k % 2 ? 2.0 : 0.5));
    EXPECT_FALSE(s.event);
    for (std::size_t i = 0; i < kForceDim; ++i) EXPECT_EQ(s.observation[obs::kForce + i], 0.0);
    if (s.terminal) break;
  }
}

TEST(SnakeEnv, GoalTermOnlyOnArrival) {
  SnakeEnv e(TaskConfig{}, bench::empty_field());
  e.reset_to(fixed({0.15, 0}));
  const auto s = e.step(neutral());
  EXPECT_FALSE(s.terminal);
  EXPECT_EQ(e.records().back().reward.goal, 0.0);

  e.reset_to(fixed({0.05, 0}));
  const auto g = e.step(neutral());
  EXPECT_TRUE(g.terminal);
  EXPECT_EQ(e.status(), EpisodeStatus::kGoalReached);
  const auto& r = e.records().back().reward;
  EXPECT_GT(r.goal, 0.0);
  EXPECT_EQ(g.reward, r.total);
  EXPECT_THROW(e.step(neutral()), std::logic_error);
}

TEST(SnakeEnv, RewardMatchesRecordedTerms) {
  SnakeEnv e(TaskConfig{}, bench::training_maze());
  e.reset(5);
  const auto& fp = e.config().field;
  for (int k = 0; k < 60; ++k) {
    const auto s = e.step(neutral());
    const auto& r = e.records().back().reward;
    EXPECT_EQ(s.reward, r.total);
    EXPECT_EQ(r.total, fp.omega_goal * r.goal + fp.omega_att * r.attract + fp.omega_rep * r.repulse);
    if (s.terminal) break;
  }
}

TEST(SnakeEnv, TruncatesAtMaxTime) {
  TaskConfig cfg;
  cfg.max_time = 0.5;
  SnakeEnv e(cfg, bench::empty_field());
  e.reset(2);
  EnvStep s;
  int n = 0;
  do {
    s = e.step(neutral());
    ++n;
  } while (!s.terminal && !s.truncated);
  EXPECT_TRUE(s.truncated);
  EXPECT_EQ(n, 10);
}

TEST(SnakeEnv, OverlappingSpawnIsScenarioError) {
  SnakeEnv e(TaskConfig{}, bench::empty_field());
  EXPECT_THROW(e.reset_to(fixed({1, 0}, {{{-0.1, 0.0}, 0.02}})), std::runtime_error);
}

TEST(SnakeEnv, DirectCurvatureSkipsOscillator) {
  TaskConfig cfg;
  cfg.direct_curvature = true;
  SnakeEnv e(cfg, bench::empty_field());
  e.reset(1);
  auto a = neutral();
  a.a1 = {1, -1, 0.5, 0};
  e.step(a);
  const auto& psi = e.records().back().psi;
  EXPECT_DOUBLE_EQ(psi[0], cfg.direct_psi_max * std::tanh(1.0));
  EXPECT_DOUBLE_EQ(psi[3], 0.0);
}

TEST(SnakeEnv, EchoesPreviousDecision) {
  SnakeEnv e(TaskConfig{}, bench::empty_field());
  e.reset(1);
  auto a = neutral(2.0);
  a.a1 = {0.1, 0.2, 0.3, 0.4};
  a.option_code = 0.5;
  a.beta = 0.125;
  const auto s = e.step(a);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(s.observation[obs::kPrevAction + i], a.a1[i]);
  EXPECT_EQ(s.observation[obs::kPrevOption], 0.5);
  EXPECT_EQ(s.observation[obs::kPrevBeta], 0.125);
}

TEST(TaskConfig, Validation) {
  TaskConfig c;
  EXPECT_NO_THROW(c.validate());
  c.physics_dt = 0.1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.options = {};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.robot.n_links = 5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
