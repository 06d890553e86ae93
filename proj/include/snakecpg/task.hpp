// Goal-reaching task for the snake: oscillator network, body proxy, maze,
// shared reward and termination, stepped at the control rate.

#ifndef SNAKECPG_TASK_HPP_
#define SNAKECPG_TASK_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "snakecpg/cpg.hpp"
#include "snakecpg/episode.hpp"
#include "snakecpg/field.hpp"
#include "snakecpg/interface.hpp"
#include "snakecpg/robot.hpp"
#include "snakecpg/scenario.hpp"
#include "snakecpg/sensing.hpp"

namespace snakecpg::env {

struct TaskConfig {
  RobotConfig robot;
  cpg::OscillatorParams cpg = cpg::default_params();
  reward::FieldParams field;
  TerminationParams termination;
  double control_dt = 0.05;
  double physics_dt = 1e-3;
  double detection_radius = 0.15;
  double max_time = 40.0;
  std::vector<double> options{0.5, 1.0, 2.0, 4.0};
  // Seconds of oscillator settling under neutral input before each episode.
  double warmup = 10.0;
  // Ablation without the oscillator: psi = direct_psi_max * tanh(a1).
  bool direct_curvature = false;
  double direct_psi_max = 0.5;
  // Repulsion is evaluated no closer than this to an obstacle surface. The
  // default is the body half-width: anything closer is contact penetration.
  double min_repulse_distance = 0.015;

  double max_option() const {
    return options.empty() ? 1.0 : *std::max_element(options.begin(), options.end());
  }

  void validate() const {
    robot.validate();
    cpg.validate();
    field.validate();
    if (!(control_dt > 0.0) || !(physics_dt > 0.0) || physics_dt > control_dt)
      throw std::invalid_argument("need 0 < physics_dt <= control_dt");
    if (!(detection_radius > 0.0) || !(max_time > 0.0))
      throw std::invalid_argument("detection radius and max_time must be > 0");
    if (options.empty()) throw std::invalid_argument("option set is empty");
    for (double k : options)
      if (!(k > 0.0)) throw std::invalid_argument("options must be positive");
    if (robot.n_links != kNumLinks)
      throw std::invalid_argument("the task observation assumes 4 links");
  }
};

// One control step, for export and plotting.
struct StepRecord {
  double time = 0.0;
  Pose head;
  Vec2 velocity;
  LinkVector kappa{};
  LinkVector psi{};
  LinkVector tonic_imbalance{};
  double k_f = 1.0;
  ContactForceVector f{};
  reward::RewardTerms reward;
  bool event = false;
  bool regulator_active = false;
  bool jammed = false;
  EpisodeStatus status = EpisodeStatus::kRunning;
};

class SnakeEnv {
 public:
  SnakeEnv(TaskConfig cfg, bench::MazeSpec maze)
      : cfg_(std::move(cfg)), maze_(maze) {
    cfg_.validate();
    warm_ = cpg::OscillatorNetworkState::kicked(cfg_.cpg.n);
    const cpg::CpgCommand neutral{cpg::TonicInput::uniform(0.5, 0.5), 1.0};
    const auto n = static_cast<std::size_t>(std::llround(cfg_.warmup / cfg_.physics_dt));
    for (std::size_t k = 0; k < n; ++k)
      warm_ = cpg::step_network(warm_, cfg_.cpg, neutral, cfg_.physics_dt);
    const LinkVector psi = cpg::network_output(warm_);
    warm_kappa_.resize(kNumLinks);
    for (std::size_t i = 0; i < kNumLinks; ++i)
      warm_kappa_[i] = cfg_.direct_curvature ? 0.0 : cfg_.robot.kappa_gain * psi[i];
  }

  const TaskConfig& config() const { return cfg_; }
  const bench::MazeSpec& maze() const { return maze_; }

  // Pins every reset to this scenario instead of generating one.
  void set_fixed_scenario(std::optional<bench::Scenario> sc) { fixed_ = std::move(sc); }

  std::vector<double> reset(std::uint64_t seed) {
    if (fixed_) return reset_to(*fixed_);
    return reset_to(bench::generate_scenario(maze_, seed, cfg_.robot, warm_kappa_));
  }

  std::vector<double> reset_to(const bench::Scenario& sc) {
    scenario_ = sc;
    cpg_ = warm_;
    robot_ = make_state(cfg_.robot, sc.spawn, warm_kappa_);
    if (overlaps(cfg_.robot, robot_, scenario_.obstacles))
      throw std::runtime_error("scenario error: obstacle overlaps the spawn pose");
    TerminationParams tp = cfg_.termination;
    tp.accept_radius = sc.accept_radius;
    monitor_.emplace(sc.goal, tp);
    time_ = 0.0;
    f_ = {};
    prev_goal_.reset();
    records_.clear();
    const auto near = nearest_obstacle(robot_, scenario_.obstacles);
    event_ = event_trigger(f_, near.distance, cfg_.detection_radius);
    obs_ = observe(robot_, sc.goal, std::nullopt, cfg_.control_dt, {}, f_, near);
    prev_goal_ = goal_polar(robot_, sc.goal);
    return {obs_.begin(), obs_.end()};
  }

  bool event_active() const { return event_; }

  EnvStep step(const JointAction& a) {
    if (!monitor_) throw std::logic_error("step before reset");
    if (monitor_->status() != EpisodeStatus::kRunning)
      throw std::logic_error("step after episode end");
    const Vec2 head_before = robot_.poses.front().position;
    const auto substeps = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(cfg_.control_dt / cfg_.physics_dt)));
    const double h = cfg_.control_dt / static_cast<double>(substeps);

    LinkVector direct_psi{};
    if (cfg_.direct_curvature) {
      if (a.a1.size() < kNumLinks) throw std::invalid_argument("a1 too short");
      for (std::size_t i = 0; i < kNumLinks; ++i)
        direct_psi[i] = cfg_.direct_psi_max * std::tanh(a.a1[i]);
    }
    SensorReadings avg(kNumBodies, {0.0, 0.0, 0.0, 0.0});
    LinkVector psi{};
    for (std::size_t k = 0; k < substeps; ++k) {
      if (cfg_.direct_curvature) {
        psi = direct_psi;
      } else {
        cpg_ = cpg::step_network(cpg_, cfg_.cpg, a.command, h);
        psi = cpg::network_output(cpg_);
      }
      auto res = env::step(cfg_.robot, robot_, psi, scenario_.obstacles, h);
      robot_ = std::move(res.state);
      for (std::size_t b = 0; b < kNumBodies; ++b)
        for (std::size_t s = 0; s < kSensorsPerBody; ++s)
          avg[b][s] += res.readings[b][s] / static_cast<double>(substeps);
    }
    time_ += cfg_.control_dt;

    f_ = sense_contacts(avg);
    const auto near = nearest_obstacle(robot_, scenario_.obstacles);
    PreviousDecision echo;
    for (std::size_t i = 0; i < kNumLinks && i < a.a1.size(); ++i) echo.action[i] = a.a1[i];
    echo.option = a.option_code;
    echo.beta = a.beta;
    obs_ = observe(robot_, scenario_.goal, prev_goal_, cfg_.control_dt, echo, f_, near);
    prev_goal_ = goal_polar(robot_, scenario_.goal);
    event_ = event_trigger(f_, near.distance, cfg_.detection_radius);

    const Vec2 head = robot_.poses.front().position;
    const Vec2 v = (head - head_before) / cfg_.control_dt;
    const EpisodeStatus status = monitor_->update(head, v, cfg_.control_dt);
    const auto terms = reward_at(v, head, prev_goal_->theta,
                                 status == EpisodeStatus::kGoalReached);

    StepRecord rec;
    rec.time = time_;
    rec.head = robot_.poses.front();
    rec.velocity = v;
    for (std::size_t i = 0; i < kNumLinks; ++i) rec.kappa[i] = robot_.kappa[i];
    rec.psi = psi;
    rec.tonic_imbalance = a.command.tonic.imbalance();
    rec.k_f = a.command.k_f;
    rec.f = f_;
    rec.reward = terms;
    rec.event = event_;
    rec.regulator_active = a.a2.has_value();
    rec.jammed = monitor_->jammed();
    rec.status = status;
    records_.push_back(rec);

    EnvStep out;
    out.observation.assign(obs_.begin(), obs_.end());
    out.reward = terms.total;
    out.terminal = status != EpisodeStatus::kRunning;
    out.truncated = !out.terminal && time_ + 1e-9 >= cfg_.max_time;
    out.event = event_;
    return out;
  }

  const RobotState& robot() const { return robot_; }
  const cpg::OscillatorNetworkState& oscillators() const { return cpg_; }
  const bench::Scenario& scenario() const { return scenario_; }
  const std::vector<StepRecord>& records() const { return records_; }
  EpisodeStatus status() const {
    return monitor_ ? monitor_->status() : EpisodeStatus::kRunning;
  }
  double time() const { return time_; }
  double jam_time() const { return monitor_ ? monitor_->jam_time() : 0.0; }
  const std::vector<double>& warm_kappa() const { return warm_kappa_; }

 private:
  // The goal term is a termination reward: it is paid on the step that enters
  // the accepting area and is zero otherwise.
  reward::RewardTerms reward_at(Vec2 v, Vec2 p, double theta_g,
                                bool reached) const {
    const auto& fp = cfg_.field;
    reward::RewardTerms r;
    if (reached)
      r.goal = reward::goal_reward(theta_g, norm(scenario_.goal - p), fp.levels);
    r.attract = dot(v, reward::attract_force(p, scenario_.goal, fp.k_att));
    Vec2 q = p;
    for (const auto& ob : scenario_.obstacles) {
      const Vec2 d = q - ob.center;
      const double dist = norm(d);
      const double floor = ob.radius + cfg_.min_repulse_distance;
      if (dist < floor) q = ob.center + (dist > 0.0 ? d / dist : Vec2{1.0, 0.0}) * floor;
    }
    r.repulse = dot(v, reward::repulse_force(q, scenario_.obstacles, fp.k_rep, fp.rho_0));
    r.total = fp.omega_goal * r.goal + fp.omega_att * r.attract + fp.omega_rep * r.repulse;
    return r;
  }

  TaskConfig cfg_;
  bench::MazeSpec maze_;
  std::optional<bench::Scenario> fixed_;
  cpg::OscillatorNetworkState warm_;
  std::vector<double> warm_kappa_;

  bench::Scenario scenario_;
  cpg::OscillatorNetworkState cpg_;
  RobotState robot_;
  std::optional<EpisodeMonitor> monitor_;
  std::optional<GoalPolar> prev_goal_;
  ContactForceVector f_{};
  ObservationVector obs_{};
  bool event_ = false;
  double time_ = 0.0;
  std::vector<StepRecord> records_;
};

static_assert(Environment<SnakeEnv>);

}  // namespace snakecpg::env

#endif  // SNAKECPG_TASK_HPP_
