// Contact force composition, obstacle proximity, the 26-state observation and
// the regulator's event trigger.

#ifndef SNAKECPG_SENSING_HPP_
#define SNAKECPG_SENSING_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>

#include "snakecpg/cpg.hpp"
#include "snakecpg/geometry.hpp"
#include "snakecpg/robot.hpp"

namespace snakecpg::env {

inline constexpr std::size_t kNumBodies = kNumLinks + 1;
inline constexpr std::size_t kForceDim = 2 * kNumBodies;
inline constexpr std::size_t kObservationDim = 26;
inline constexpr std::size_t kControllerInputDim = 14;

// f_1..f_10, head body first.
using ContactForceVector = std::array<double, kForceDim>;
using ObservationVector = std::array<double, kObservationDim>;

// Offsets into the observation vector.
namespace obs {
inline constexpr std::size_t kRhoGoal = 0;
inline constexpr std::size_t kRhoGoalRate = 1;
inline constexpr std::size_t kThetaGoal = 2;
inline constexpr std::size_t kThetaGoalRate = 3;
inline constexpr std::size_t kKappa = 4;
inline constexpr std::size_t kPrevAction = 8;
inline constexpr std::size_t kPrevOption = 12;
inline constexpr std::size_t kPrevBeta = 13;
inline constexpr std::size_t kForce = 14;
inline constexpr std::size_t kObstacleDistance = 24;
inline constexpr std::size_t kObstacleBearing = 25;
}  // namespace obs

inline constexpr double kNoObstacleDistance = 10.0;

// f_{2i-1} = f_iB - f_iC and f_{2i} = f_iD - f_iA.
inline ContactForceVector sense_contacts(const SensorReadings& raw) {
  if (raw.size() != kNumBodies)
    throw std::invalid_argument("expected readings for 5 bodies");
  ContactForceVector f{};
  for (std::size_t i = 0; i < kNumBodies; ++i) {
    for (double r : raw[i])
      if (!(r >= 0.0))
        throw std::invalid_argument("sensor readings must be nonnegative");
    f[2 * i] = raw[i][kB] - raw[i][kC];
    f[2 * i + 1] = raw[i][kD] - raw[i][kA];
  }
  return f;
}

inline double force_norm(const ContactForceVector& f) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(s);
}

struct NearestObstacle {
  double distance = kNoObstacleDistance;
  double bearing = 0.0;  // head frame, counter-clockwise positive
};

inline NearestObstacle nearest_obstacle(const RobotState& st,
                                        std::span<const Obstacle> obstacles) {
  NearestObstacle out;
  if (obstacles.empty()) return out;
  const Pose& head = st.poses.front();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ob : obstacles) {
    const Vec2 d = ob.center - head.position;
    const double gap = norm(d) - ob.radius;
    if (gap < best) {
      best = gap;
      out.bearing = wrap_angle(std::atan2(d.y, d.x) - head.heading);
    }
  }
  out.distance = std::min(std::max(best, 0.0), kNoObstacleDistance);
  return out;
}

// Direction of the body axis, from the tail body to the head body. The head
// itself swings with the gait; the axis gives a steadier goal bearing.
inline double body_axis_heading(const RobotState& st) {
  const Vec2 d = st.poses.front().position - st.poses.back().position;
  if (norm(d) < 1e-12) return st.poses.front().heading;
  return std::atan2(d.y, d.x);
}

struct GoalPolar {
  double rho = 0.0;
  double theta = 0.0;
};

inline GoalPolar goal_polar(const RobotState& st, Vec2 goal) {
  const Vec2 d = goal - st.poses.front().position;
  GoalPolar g;
  g.rho = norm(d);
  g.theta = g.rho > 0.0
                ? wrap_angle(std::atan2(d.y, d.x) - body_axis_heading(st))
                : 0.0;
  return g;
}

// Previous-step decision echoed back into the observation.
struct PreviousDecision {
  LinkVector action{};
  double option = 0.0;  // K_f normalised by the largest option
  double beta = 0.0;
};

// Rates are backward differences against `prev` over dt; without history they
// are zero.
inline ObservationVector observe(const RobotState& st, Vec2 goal,
                                 std::optional<GoalPolar> prev, double dt,
                                 const PreviousDecision& decision,
                                 const ContactForceVector& f,
                                 const NearestObstacle& nearest) {
  ObservationVector z{};
  const GoalPolar g = goal_polar(st, goal);
  z[obs::kRhoGoal] = g.rho;
  z[obs::kThetaGoal] = g.theta;
  if (prev && dt > 0.0) {
    z[obs::kRhoGoalRate] = (g.rho - prev->rho) / dt;
    z[obs::kThetaGoalRate] = wrap_angle(g.theta - prev->theta) / dt;
  }
  for (std::size_t i = 0; i < kNumLinks; ++i) {
    z[obs::kKappa + i] = st.kappa.at(i);
    z[obs::kPrevAction + i] = decision.action[i];
  }
  z[obs::kPrevOption] = decision.option;
  z[obs::kPrevBeta] = decision.beta;
  for (std::size_t i = 0; i < kForceDim; ++i) z[obs::kForce + i] = f[i];
  z[obs::kObstacleDistance] = nearest.distance;
  z[obs::kObstacleBearing] = nearest.bearing;
  return z;
}

inline constexpr double kContactEpsilon = 1e-9;

inline bool event_trigger(const ContactForceVector& f, double d_o, double D) {
  if (!(D > 0.0)) throw std::invalid_argument("detection radius must be > 0");
  return force_norm(f) > kContactEpsilon || d_o < D;
}

}  // namespace snakecpg::env

#endif  // SNAKECPG_SENSING_HPP_
