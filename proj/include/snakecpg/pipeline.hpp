// Experiment orchestration for the snake: network shapes, free-space
// pretraining of the controller, fictitious-play training in the maze, and
// the evaluation protocol behind the comparison table.

#ifndef SNAKECPG_PIPELINE_HPP_
#define SNAKECPG_PIPELINE_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "snakecpg/game.hpp"
#include "snakecpg/metrics.hpp"
#include "snakecpg/task.hpp"

namespace snakecpg::bench {

// Rough unit normalisation of the controller's 14 observation entries.
inline std::vector<double> controller_input_scale() {
  return {1.0, 5.0, 1.0, 0.5,              // rho, rho rate, theta, theta rate
          0.1, 0.1, 0.1, 0.1,              // kappa
          0.5, 0.5, 0.5, 0.5, 1.0, 1.0};   // previous action, option, beta
}

inline std::vector<double> regulator_input_scale() {
  auto s = controller_input_scale();
  for (std::size_t i = 0; i < env::kForceDim; ++i) s.push_back(0.5);
  s.push_back(2.0);                   // d_o, capped at 10 m
  s.push_back(1.0 / std::numbers::pi);  // phi_o
  return s;
}

inline policy::NetSpec controller_spec(std::size_t hidden, std::size_t options) {
  policy::NetSpec s;
  s.input = env::kControllerInputDim;
  s.hidden = hidden;
  s.actions = kNumLinks;
  s.options = options;
  s.termination = options > 0;
  s.input_scale = controller_input_scale();
  return s;
}

inline policy::NetSpec regulator_spec(std::size_t hidden) {
  policy::NetSpec s;
  s.input = env::kObservationDim;
  s.hidden = hidden;
  s.actions = kNumLinks;
  s.input_scale = regulator_input_scale();
  return s;
}

struct PretrainConfig {
  std::size_t updates = 60;
  std::size_t hidden = 64;
  env::TaskConfig task;
  MazeSpec field = empty_field();
  game::GameConfig game;
};

// Fixed-length PPO on the controller alone (no regulator).
inline game::JointPolicy pretrain_free(const PretrainConfig& pc, std::uint64_t seed,
                                       const game::Logger& log = {},
                                       game::LearnResult* result = nullptr) {
  env::SnakeEnv e(pc.task, pc.field);
  const std::size_t n_opt = pc.task.direct_curvature ? 0 : pc.game.options.size();
  game::JointPolicy joint{policy::Network::random(controller_spec(pc.hidden, n_opt),
                                                  game::splitmix64(seed ^ 0xC1)),
                          std::nullopt, game::Player::kController};
  game::GameConfig g = pc.game;
  g.options = pc.task.options;
  g.min_updates = pc.updates;
  g.max_updates = pc.updates;
  g.seed = seed;
  std::mt19937_64 rng(game::splitmix64(seed));
  game::SeedStream seeds(seed);
  auto r = game::ppo_learning(e, joint, game::Player::kController, g, seeds, rng, log, 0);
  if (result) *result = r;
  return joint;
}

struct TrainConfig {
  std::size_t hidden = 64;
  env::TaskConfig task;
  MazeSpec maze = training_maze();
  game::GameConfig game;
};

// Fictitious play from the pretrained controller and a fresh regulator.
inline game::PlayResult train_joint(const policy::Network& pi1_0, const TrainConfig& tc,
                                    const game::Logger& log = {},
                                    const game::MacroHook& hook = {}) {
  env::SnakeEnv e(tc.task, tc.maze);
  game::GameConfig g = tc.game;
  g.options = tc.task.options;
  game::JointPolicy joint{pi1_0,
                          policy::Network::random(regulator_spec(tc.hidden),
                                                  game::splitmix64(g.seed ^ 0x52)),
                          game::Player::kRegulator};
  return game::fictitious_play(e, std::move(joint), g, log, hook);
}

struct EvalConfig {
  std::size_t episodes = 30;
  std::uint64_t seed = 7;
  MazeSpec maze = test_maze();
  env::TaskConfig task;
  bool greedy = true;
};

inline EpisodeMetrics episode_metrics(const env::SnakeEnv& e, const game::Trajectory& tr) {
  EpisodeMetrics m;
  m.task_time = e.time();
  m.jam_time = e.jam_time();
  m.success = e.status() == env::EpisodeStatus::kGoalReached;
  if (m.success) m.time_to_goal = e.time();
  for (const auto& r : e.records()) m.distance += norm(r.velocity) * e.config().control_dt;
  m.mean_speed = m.task_time > 0.0 ? m.distance / m.task_time : 0.0;
  m.event_trigger_fraction = tr.event_rate();
  return m;
}

struct EvalOutput {
  std::vector<EpisodeMetrics> episodes;
  std::vector<std::uint64_t> scenario_seeds;
  AggregateMetrics aggregate;
};

// Scenario k uses seed splitmix64(seed + k), so two policies evaluated with
// the same seed meet the same mazes.
inline EvalOutput evaluate(const game::JointPolicy& joint, const EvalConfig& ec,
                           const game::GameConfig& gc = {},
                           const std::function<void(std::size_t, const env::SnakeEnv&,
                                                    const game::Trajectory&)>& on_episode = {}) {
  env::SnakeEnv e(ec.task, ec.maze);
  game::GameConfig g = gc;
  g.options = ec.task.options;
  EvalOutput out;
  for (std::size_t k = 0; k < ec.episodes; ++k) {
    const std::uint64_t s = game::splitmix64(ec.seed + k);
    std::mt19937_64 rng(s);
    const auto tr = game::rollout(e, joint, g, s, rng, {ec.greedy});
    out.episodes.push_back(episode_metrics(e, tr));
    out.scenario_seeds.push_back(s);
    if (on_episode) on_episode(k, e, tr);
  }
  out.aggregate = compute_metrics(out.episodes);
  return out;
}

}  // namespace snakecpg::bench

#endif  // SNAKECPG_PIPELINE_HPP_
