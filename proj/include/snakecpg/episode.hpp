// Jam detection and episode termination.

#ifndef SNAKECPG_EPISODE_HPP_
#define SNAKECPG_EPISODE_HPP_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>

#include "snakecpg/geometry.hpp"

namespace snakecpg::env {

enum class EpisodeStatus { kRunning, kGoalReached, kStarved, kMissedGoal };

inline std::string_view to_string(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::kRunning: return "running";
    case EpisodeStatus::kGoalReached: return "goal_reached";
    case EpisodeStatus::kStarved: return "starved";
    case EpisodeStatus::kMissedGoal: return "missed_goal";
  }
  return "unknown";
}

struct JamParams {
  double v0 = 0.02;     // m/s
  double t_jam = 0.3;   // s
};

// Slack for comparing accumulated durations against thresholds.
inline constexpr double kTimeSlack = 1e-9;

// Tracks the current run of below-threshold speed. Once a run lasts t_jam the
// whole run counts as jam time.
class JamTracker {
 public:
  explicit JamTracker(JamParams p = {}) : p_(p) {
    if (!(p_.v0 > 0.0) || !(p_.t_jam > 0.0))
      throw std::invalid_argument("jam thresholds must be positive");
  }

  void update(double speed, double dt) {
    if (speed < p_.v0) {
      run_ += dt;
      if (jammed()) {
        jam_time_ += counted_ ? dt : run_;
        counted_ = true;
      }
    } else {
      run_ = 0.0;
      counted_ = false;
    }
  }

  bool jammed() const { return run_ + kTimeSlack >= p_.t_jam; }
  double run() const { return run_; }
  double jam_time() const { return jam_time_; }

 private:
  JamParams p_;
  double run_ = 0.0;
  double jam_time_ = 0.0;
  bool counted_ = false;
};

// True iff the speed history ends in a below-v0 run lasting at least t_jam.
inline bool jam_detector(std::span<const double> speeds, double dt,
                         JamParams p = {}) {
  JamTracker t(p);
  for (double s : speeds) t.update(s, dt);
  return t.jammed();
}

struct TerminationParams {
  double accept_radius = 0.1;
  JamParams jam;
  double starve_time = 0.9;          // s of continuous jam
  std::size_t missed_goal_steps = 60;  // consecutive control steps
};

class EpisodeMonitor {
 public:
  explicit EpisodeMonitor(Vec2 goal, TerminationParams p = {})
      : goal_(goal), p_(p), jam_(p.jam) {}

  // One control step: head position after the step and the head velocity over
  // it.
  EpisodeStatus update(Vec2 head, Vec2 velocity, double dt) {
    if (status_ != EpisodeStatus::kRunning) return status_;
    elapsed_ += dt;
    jam_.update(norm(velocity), dt);
    const Vec2 to_goal = goal_ - head;
    const double dist = norm(to_goal);
    if (dist < p_.accept_radius) return status_ = EpisodeStatus::kGoalReached;
    if (jam_.run() + kTimeSlack >= p_.starve_time)
      return status_ = EpisodeStatus::kStarved;
    if (dot(velocity, to_goal / dist) < 0.0) {
      if (++receding_ >= p_.missed_goal_steps)
        return status_ = EpisodeStatus::kMissedGoal;
    } else {
      receding_ = 0;
    }
    return status_;
  }

  EpisodeStatus status() const { return status_; }
  double elapsed() const { return elapsed_; }
  double jam_time() const { return jam_.jam_time(); }
  bool jammed() const { return jam_.jammed(); }

 private:
  Vec2 goal_;
  TerminationParams p_;
  JamTracker jam_;
  EpisodeStatus status_ = EpisodeStatus::kRunning;
  std::size_t receding_ = 0;
  double elapsed_ = 0.0;
};

// Replays a history of per-control-step head positions and velocities.
inline EpisodeStatus episode_status(std::span<const Vec2> heads,
                                    std::span<const Vec2> velocities, Vec2 goal,
                                    double dt, TerminationParams p = {}) {
  if (heads.empty() || heads.size() != velocities.size())
    throw std::invalid_argument("history must be nonempty and aligned");
  EpisodeMonitor m(goal, p);
  for (std::size_t k = 0; k < heads.size(); ++k)
    if (m.update(heads[k], velocities[k], dt) != EpisodeStatus::kRunning) break;
  return m.status();
}

}  // namespace snakecpg::env

#endif  // SNAKECPG_EPISODE_HPP_
