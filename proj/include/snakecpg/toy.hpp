// Small environments for exercising the trainer: a one-shot cooperative
// matrix game, and a planar point mass (optionally confined to a corridor)
// rewarded by the potential field.

#ifndef SNAKECPG_TOY_HPP_
#define SNAKECPG_TOY_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "snakecpg/field.hpp"
#include "snakecpg/game.hpp"
#include "snakecpg/geometry.hpp"
#include "snakecpg/interface.hpp"

namespace snakecpg::toy {

// One-step game. The controller's option index picks the row and the sign of
// the regulator's first action component picks the column (positive -> 1).
// Both players receive payoff[row][col].
class MatrixGameEnv {
 public:
  explicit MatrixGameEnv(std::vector<std::vector<double>> payoff,
                         std::size_t obs_width = 2)
      : payoff_(std::move(payoff)), width_(obs_width) {
    if (payoff_.size() != 2 || payoff_[0].size() != 2 || payoff_[1].size() != 2)
      throw std::invalid_argument("payoff must be 2x2");
  }

  static MatrixGameEnv coordination() { return MatrixGameEnv({{0.0, 0.0}, {0.0, 1.0}}); }

  std::vector<double> reset(std::uint64_t) { return std::vector<double>(width_, 1.0); }
  bool event_active() const { return true; }

  EnvStep step(const JointAction& a) {
    const std::size_t row = a.option == 1 ? 1 : 0;
    const std::size_t col = (a.a2 && !a.a2->empty() && (*a.a2)[0] > 0.0) ? 1 : 0;
    EnvStep s;
    s.observation.assign(width_, 1.0);
    s.reward = payoff_[row][col];
    s.terminal = true;
    return s;
  }

  double payoff(std::size_t r, std::size_t c) const { return payoff_[r][c]; }

 private:
  std::vector<std::vector<double>> payoff_;
  std::size_t width_;
};

// Trainer settings for the 2x2 game: a two-option controller and a small
// regulator, with enough episodes per phase that the value estimates settle.
inline game::GameConfig matrix_game_config(std::uint64_t seed) {
  game::GameConfig gc;
  gc.seed = seed;
  gc.options = {0.5, 1.0};
  gc.epsilon = 0.02;
  gc.epsilon_inner = 0.01;
  gc.n_max = 20;
  gc.eval_episodes = 200;
  gc.episodes_per_update = 64;
  gc.min_updates = 6;
  gc.max_updates = 60;
  gc.learner.actor_lr = 3e-3;
  gc.learner.critic_lr = 3e-3;
  gc.learner.kl_target = 0.0;
  return gc;
}

inline game::JointPolicy matrix_game_players(std::uint64_t seed, std::size_t width = 2) {
  policy::NetSpec s1;
  s1.input = width;
  s1.hidden = 16;
  s1.options = 2;
  s1.termination = true;
  policy::NetSpec s2;
  s2.input = width;
  s2.hidden = 16;
  return {policy::Network::random(s1, seed * 7 + 1), policy::Network::random(s2, seed * 7 + 2)};
}

// Marginals of the learned profile: P(row 1) and P(column 1).
inline std::pair<double, double> matrix_game_marginals(const game::JointPolicy& j,
                                                       std::size_t width = 2) {
  const std::vector<double> x(width, 1.0);
  const auto o1 = j.pi1.forward(x);
  const auto o2 = j.pi2->forward(x);
  const double col = 0.5 * std::erfc(-o2.mean[0] / (std::exp(o2.log_std[0]) * std::sqrt(2.0)));
  return {o1.option_probs.at(1), col};
}

struct PointMassConfig {
  double goal_distance = 1.0;
  double max_speed = 0.5;
  double dt = 0.1;
  std::size_t horizon = 60;
  double accept_radius = 0.1;
  bool corridor = false;  // y locked to zero, goal on +x
  std::vector<env::Obstacle> obstacles;
  reward::FieldParams field;
  std::size_t obs_width = 14;
};

// Velocity-commanded point mass: v = max_speed * tanh(a1[0:2]).
class PointMassEnv {
 public:
  explicit PointMassEnv(PointMassConfig cfg = {}) : cfg_(std::move(cfg)) {
    cfg_.field.validate();
    if (cfg_.obs_width < 8) throw std::invalid_argument("point-mass obs needs >= 8");
  }

  std::vector<double> reset(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    p_ = {0.0, 0.0};
    v_ = {};
    const double phi = cfg_.corridor ? 0.0 : ang(rng);
    goal_ = unit(phi) * cfg_.goal_distance;
    t_ = 0;
    prev_rho_ = norm(goal_ - p_);
    prev_theta_ = 0.0;
    done_ = false;
    return observation(0.0, 0.0);
  }

  bool event_active() const { return false; }

  EnvStep step(const JointAction& a) {
    if (done_) throw std::logic_error("step after episode end");
    if (a.a1.size() < 2) throw std::invalid_argument("point mass needs 2 action components");
    v_ = {cfg_.max_speed * std::tanh(a.a1[0]),
          cfg_.corridor ? 0.0 : cfg_.max_speed * std::tanh(a.a1[1])};
    p_ += v_ * cfg_.dt;
    ++t_;
    const Vec2 to_goal = goal_ - p_;
    const double rho = norm(to_goal);
    const double theta =
        norm(v_) > 0.0 ? wrap_angle(std::atan2(to_goal.y, to_goal.x) - std::atan2(v_.y, v_.x))
                       : 0.0;
    const bool reached = rho < cfg_.accept_radius;
    auto terms = reward::reward_terms(v_, p_, goal_, theta, cfg_.obstacles, cfg_.field);
    if (!reached) terms.total -= cfg_.field.omega_goal * terms.goal;
    EnvStep s;
    s.reward = terms.total;
    s.terminal = reached;
    s.truncated = !reached && t_ >= cfg_.horizon;
    done_ = s.terminal || s.truncated;
    s.observation = observation((rho - prev_rho_) / cfg_.dt,
                                wrap_angle(theta - prev_theta_) / cfg_.dt);
    prev_rho_ = rho;
    prev_theta_ = theta;
    return s;
  }

  Vec2 position() const { return p_; }
  Vec2 goal() const { return goal_; }

 private:
  std::vector<double> observation(double rho_rate, double theta_rate) const {
    std::vector<double> o(cfg_.obs_width, 0.0);
    const Vec2 d = goal_ - p_;
    o[0] = norm(d);
    o[1] = rho_rate;
    o[2] = std::atan2(d.y, d.x);
    o[3] = theta_rate;
    o[4] = d.x;
    o[5] = d.y;
    o[6] = v_.x;
    o[7] = v_.y;
    return o;
  }

  PointMassConfig cfg_;
  Vec2 p_, v_, goal_;
  std::size_t t_ = 0;
  double prev_rho_ = 0.0, prev_theta_ = 0.0;
  bool done_ = false;
};

static_assert(Environment<MatrixGameEnv>);
static_assert(Environment<PointMassEnv>);

}  // namespace snakecpg::toy

#endif  // SNAKECPG_TOY_HPP_
