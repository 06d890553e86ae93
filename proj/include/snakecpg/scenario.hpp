// Obstacle mazes between the spawn pose and the goal.

#ifndef SNAKECPG_SCENARIO_HPP_
#define SNAKECPG_SCENARIO_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "snakecpg/geometry.hpp"
#include "snakecpg/robot.hpp"

namespace snakecpg::bench {

struct Scenario {
  std::vector<env::Obstacle> obstacles;
  Vec2 goal;
  double accept_radius = 0.1;
  env::Pose spawn;
  std::uint64_t seed = 0;
};

struct MazeSpec {
  std::size_t rows = 3;  // along the spawn-goal line
  std::size_t cols = 3;  // across it
  double spacing = 0.08;
  double radius = 0.02;
  double noise_clip = 0.01;
  double goal_distance = 1.5;
  double max_deviation_deg = 60.0;
  double accept_radius = 0.1;

  void validate() const {
    if (!(spacing > 0.0) || !(radius > 0.0) || !(goal_distance > 0.0) ||
        !(accept_radius > 0.0) || !(noise_clip >= 0.0))
      throw std::invalid_argument("maze dimensions must be positive");
    if (!(max_deviation_deg >= 0.0 && max_deviation_deg <= 180.0))
      throw std::invalid_argument("deviation must be in [0, 180] degrees");
  }
};

inline MazeSpec training_maze() { return {}; }

inline MazeSpec test_maze() {
  MazeSpec m;
  m.rows = 5;
  m.cols = 6;
  m.goal_distance = 2.0;
  m.max_deviation_deg = 90.0;
  return m;
}

inline MazeSpec empty_field() {
  MazeSpec m;
  m.rows = 0;
  m.cols = 0;
  return m;
}

// Standard normal restricted to (-clip, clip) by rejection.
template <class Rng>
double clipped_noise(Rng& rng, double clip) {
  if (clip <= 0.0) return 0.0;
  std::normal_distribution<double> nd(0.0, 1.0);
  for (;;) {
    const double w = nd(rng);
    if (w > -clip && w < clip) return w;
  }
}

inline constexpr int kMaxScenarioTries = 100;

// The goal lies on +x at goal_distance from the spawn head; the robot heading
// deviates from the goal direction by a uniform magnitude with random sign.
// The grid is centred on the midpoint of the spawn-goal segment. `spawn_kappa`
// is the body shape the robot starts in.
inline Scenario generate_scenario(const MazeSpec& spec, std::uint64_t seed,
                                  const env::RobotConfig& robot,
                                  std::span<const double> spawn_kappa = {}) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  std::vector<double> kappa(spawn_kappa.begin(), spawn_kappa.end());
  if (kappa.empty()) kappa.assign(robot.n_links, 0.0);
  for (int attempt = 0; attempt < kMaxScenarioTries; ++attempt) {
    Scenario sc;
    sc.seed = seed;
    sc.accept_radius = spec.accept_radius;
    sc.goal = {spec.goal_distance, 0.0};
    const double dev =
        spec.max_deviation_deg * std::numbers::pi / 180.0 * unit01(rng);
    sc.spawn = {{0.0, 0.0}, unit01(rng) < 0.5 ? dev : -dev};
    const Vec2 mid = sc.goal * 0.5;
    for (std::size_t r = 0; r < spec.rows; ++r)
      for (std::size_t c = 0; c < spec.cols; ++c) {
        const double along =
            (static_cast<double>(r) - 0.5 * static_cast<double>(spec.rows - 1)) *
            spec.spacing;
        const double across =
            (static_cast<double>(c) - 0.5 * static_cast<double>(spec.cols - 1)) *
            spec.spacing;
        Vec2 p = mid + Vec2{along, across};
        p.x += clipped_noise(rng, spec.noise_clip);
        p.y += clipped_noise(rng, spec.noise_clip);
        sc.obstacles.push_back({p, spec.radius});
      }
    bool ok = true;
    for (const auto& ob : sc.obstacles)
      if (norm(sc.goal - ob.center) <= ob.radius) ok = false;
    const auto st = env::make_state(robot, sc.spawn, kappa);
    if (ok && !env::overlaps(robot, st, sc.obstacles)) return sc;
  }
  throw std::runtime_error("could not place a collision-free spawn");
}

template <class Rng>
Scenario generate_training_scenario(Rng& rng, const env::RobotConfig& robot = {}) {
  return generate_scenario(training_maze(), rng(), robot);
}

template <class Rng>
Scenario generate_test_scenario(Rng& rng, const env::RobotConfig& robot = {}) {
  return generate_scenario(test_maze(), rng(), robot);
}

}  // namespace snakecpg::bench

#endif  // SNAKECPG_SCENARIO_HPP_
