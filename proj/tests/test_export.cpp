#include <gtest/gtest.h>

#include <sstream>

#include "snakecpg/export.hpp"
#include "snakecpg/pipeline.hpp"

using namespace snakecpg;

namespace {

JointAction wiggle(int k) {
  JointAction a;
  a.a1.assign(4, 0.0);
  a.k_f = k % 3 ? 1.0 : 2.0;
  a.command = {cpg::TonicInput::uniform(0.5 + 0.1 * (k % 2), 0.5), a.k_f};
  return a;
}

}  // namespace

TEST(Export, TrajectoryRoundTripIsBitExact) {
  env::SnakeEnv e(env::TaskConfig{}, bench::training_maze());
  e.reset(5);
  for (int k = 0; k < 60; ++k)
    if (e.step(wiggle(k)).terminal) break;
  bench::EpisodeMetrics m;
  m.task_time = e.time();
  std::stringstream ss;
  io::write_trajectory(ss, e, m, 5);
  const auto d = io::read_trajectory(ss);
  EXPECT_EQ(d.episode.at("seed").get<std::uint64_t>(), 5u);
  ASSERT_EQ(d.steps.size(), e.records().size());
  for (std::size_t k = 0; k < d.steps.size(); ++k) {
    const auto& a = d.steps[k];
    const auto& b = e.records()[k];
    EXPECT_EQ(a.time, b.time);
    EXPECT_EQ(a.head.position, b.head.position);
    EXPECT_EQ(a.head.heading, b.head.heading);
    EXPECT_EQ(a.kappa, b.kappa);
    EXPECT_EQ(a.psi, b.psi);
    EXPECT_EQ(a.tonic_imbalance, b.tonic_imbalance);
    EXPECT_EQ(a.f, b.f);
    EXPECT_EQ(a.reward.total, b.reward.total);
    EXPECT_EQ(a.event, b.event);
    EXPECT_EQ(a.status, b.status);
  }
}

TEST(Export, TrajectoryNeedsHeader) {
  std::stringstream empty;
  EXPECT_THROW(io::read_trajectory(empty), std::invalid_argument);
  std::stringstream bad("{\"kind\":\"step\"}\n");
  EXPECT_THROW(io::read_trajectory(bad), std::invalid_argument);
}

TEST(Export, LogRoundTrip) {
  std::vector<game::EpisodeLog> logs(3);
  logs[0] = {0, "eval", 0, 0, -1.25, -0.1 / 3.0, 40, 0.5, 0xdeadbeefULL, 0x1ULL};
  logs[1] = {1, "R", 2, 7, 1e-300, 3.0, 12, 0.0, ~0ULL, 0ULL};
  logs[2] = {1, "C", 4, 9, 123456.789, -2.0, 1, 1.0, 42, 43};
  std::stringstream ss;
  ss << io::kLogHeader << "\n";
  for (const auto& l : logs) ss << io::log_line(l) << "\n";
  const auto back = io::read_log(ss);
  ASSERT_EQ(back.size(), logs.size());
  for (std::size_t k = 0; k < logs.size(); ++k) {
    EXPECT_EQ(back[k].macro, logs[k].macro);
    EXPECT_EQ(back[k].phase, logs[k].phase);
    EXPECT_EQ(back[k].update, logs[k].update);
    EXPECT_EQ(back[k].episode, logs[k].episode);
    EXPECT_EQ(back[k].reward, logs[k].reward);
    EXPECT_EQ(back[k].discounted, logs[k].discounted);
    EXPECT_EQ(back[k].length, logs[k].length);
    EXPECT_EQ(back[k].event_rate, logs[k].event_rate);
    EXPECT_EQ(back[k].c1_digest, logs[k].c1_digest);
    EXPECT_EQ(back[k].r2_digest, logs[k].r2_digest);
  }
  std::stringstream wrong("a,b\n");
  EXPECT_THROW(io::read_log(wrong), std::invalid_argument);
}

TEST(Export, MetricsTable) {
  bench::AggregateMetrics a;
  a.jam_ratio = 0.125;
  a.avg_linear_velocity = 0.05;
  a.success_rate = 0.9;
  a.avg_time_per_goal = 31.456;
  bench::AggregateMetrics none;
  const auto t = io::metrics_table({{"Joint", a}, {"Baseline", none}, {"Untrained", none}});
  std::stringstream ss(t);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(ss, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], io::kTableHeader);
  EXPECT_EQ(lines[1], "Joint\t0.1250\t0.0500\t0.9000\t31.46");
  EXPECT_EQ(lines[2], "Baseline\t0.0000\t0.0000\t0.0000\tn/a");
}

TEST(Export, EpisodeTable) {
  bench::EpisodeMetrics a;
  a.success = true;
  a.time_to_goal = 12.0;
  const auto t = io::episode_table({a, bench::EpisodeMetrics{}});
  EXPECT_NE(t.find("0\t1\t12.00\t"), std::string::npos);
  EXPECT_NE(t.find("1\t0\tn/a\t"), std::string::npos);
}
