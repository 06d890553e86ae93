// Planar rigid-chain proxy of the soft snake.
//
// The robot is n_links + 1 rigid bodies joined by constant-curvature soft
// links. Link curvatures track the oscillator output through a first-order
// lag; the resulting shape is prescribed and the three free coordinates of
// the chain (head position and heading) follow from momentum balance under
// anisotropic viscous friction and penalty contact with circular obstacles.

#ifndef SNAKECPG_ROBOT_HPP_
#define SNAKECPG_ROBOT_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "snakecpg/geometry.hpp"

namespace snakecpg::env {

struct Obstacle {
  Vec2 center;
  double radius = 0.02;
};

// Sensor patches of one rigid body, body frame (x forward, y left).
// A front-left, B front-right, C rear-left, D rear-right: A/D and B/C are the
// two diagonal pairs.
enum Sensor : std::size_t { kA = 0, kB = 1, kC = 2, kD = 3 };
inline constexpr std::size_t kSensorsPerBody = 4;

struct RobotConfig {
  std::size_t n_links = 4;
  double link_length = 0.10;
  double body_length = 0.04;
  double body_half_width = 0.015;
  double body_mass = 0.05;
  double c_t = 0.05;
  double c_n = 1.0;
  double kappa_gain = 20.0;
  double tau_act = 0.15;
  double contact_stiffness = 300.0;
  // Body-frame patch positions, indexed by Sensor.
  std::array<Vec2, kSensorsPerBody> sensor_offsets{
      Vec2{0.01, 0.015}, Vec2{0.01, -0.015}, Vec2{-0.01, 0.015},
      Vec2{-0.01, -0.015}};
  // Sub-chords per link arc used for contact geometry.
  std::size_t arc_samples = 4;

  std::size_t n_bodies() const { return n_links + 1; }

  double body_inertia() const {
    const double w = 2.0 * body_half_width;
    return body_mass * (body_length * body_length + w * w) / 12.0;
  }

  void validate() const {
    if (n_links < 4) throw std::invalid_argument("n_links must be >= 4");
    if (!(link_length > 0.0) || !(body_length > 0.0) ||
        !(body_half_width > 0.0) || !(body_mass > 0.0) ||
        !(kappa_gain > 0.0) || !(tau_act > 0.0) || !(contact_stiffness > 0.0))
      throw std::invalid_argument("physical constants must be positive");
    if (!(c_t > 0.0) || !(c_n > c_t))
      throw std::invalid_argument("friction requires c_n > c_t > 0");
    if (arc_samples < 1) throw std::invalid_argument("arc_samples must be >= 1");
  }
};

struct Pose {
  Vec2 position;
  double heading = 0.0;
};

struct RobotState {
  std::vector<Pose> poses;        // body 0 is the head
  std::vector<double> kappa;      // link curvatures, 1/m
  std::vector<Vec2> velocities;   // per body
  std::vector<double> angular_rates;
  Vec2 head_velocity;
  // Linear momentum and angular momentum about the world origin.
  Vec2 momentum;
  double angular_momentum = 0.0;

  bool finite() const {
    for (const auto& p : poses)
      if (!std::isfinite(p.position.x) || !std::isfinite(p.position.y) ||
          !std::isfinite(p.heading))
        return false;
    for (double k : kappa)
      if (!std::isfinite(k)) return false;
    for (const auto& v : velocities)
      if (!std::isfinite(v.x) || !std::isfinite(v.y)) return false;
    return std::isfinite(momentum.x) && std::isfinite(momentum.y) &&
           std::isfinite(angular_momentum);
  }
};

// Raw unsigned sensor magnitudes, readings[body][sensor].
using SensorReadings = std::vector<std::array<double, kSensorsPerBody>>;

struct ContactPoint {
  Vec2 point;    // on the robot surface
  Vec2 force;    // applied to the robot
  std::size_t body = 0;
  std::size_t sensor = 0;
  double penetration = 0.0;
};

struct StepResult {
  RobotState state;
  SensorReadings readings;
  std::vector<ContactPoint> contacts;
  // Drag on each body over the step, evaluated at the new velocities.
  std::vector<Vec2> friction;
};

namespace detail {

inline double sinc(double x) {
  if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace detail

// Head-frame node positions and headings for a curvature vector.
struct ChainShape {
  std::vector<Vec2> nodes;
  std::vector<double> headings;
};

inline ChainShape chain_shape(const RobotConfig& cfg,
                              std::span<const double> kappa) {
  ChainShape s;
  const std::size_t n = cfg.n_bodies();
  s.nodes.resize(n);
  s.headings.resize(n);
  s.nodes[0] = {0.0, 0.0};
  s.headings[0] = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double turn = kappa[i] * cfg.link_length;
    s.headings[i + 1] = s.headings[i] - turn;
    const double chord = cfg.link_length * detail::sinc(turn / 2.0);
    const double mid = 0.5 * (s.headings[i] + s.headings[i + 1]);
    s.nodes[i + 1] = s.nodes[i] - unit(mid) * chord;
  }
  return s;
}

inline void place(const RobotConfig& cfg, const Pose& head,
                  std::span<const double> kappa, std::vector<Pose>& poses) {
  const ChainShape s = chain_shape(cfg, kappa);
  poses.resize(cfg.n_bodies());
  for (std::size_t i = 0; i < cfg.n_bodies(); ++i) {
    poses[i].position = head.position + rotate(s.nodes[i], head.heading);
    poses[i].heading = head.heading + s.headings[i];
  }
}

// Robot at rest with the given head pose and curvatures.
inline RobotState make_state(const RobotConfig& cfg, const Pose& head,
                             std::vector<double> kappa = {}) {
  cfg.validate();
  if (kappa.empty()) kappa.assign(cfg.n_links, 0.0);
  if (kappa.size() != cfg.n_links)
    throw std::invalid_argument("kappa size must equal n_links");
  RobotState st;
  st.kappa = std::move(kappa);
  place(cfg, head, st.kappa, st.poses);
  st.velocities.assign(cfg.n_bodies(), Vec2{});
  st.angular_rates.assign(cfg.n_bodies(), 0.0);
  return st;
}

// World-frame sensor patch position.
inline Vec2 sensor_position(const RobotConfig& cfg, const Pose& body,
                            std::size_t sensor) {
  return body.position + rotate(cfg.sensor_offsets[sensor], body.heading);
}

// Backbone polyline: head cap, sampled link arcs, tail cap.
inline std::vector<Vec2> backbone(const RobotConfig& cfg,
                                  const RobotState& st) {
  std::vector<Vec2> pts;
  const auto& poses = st.poses;
  const double half = 0.5 * cfg.body_length;
  pts.push_back(poses.front().position + unit(poses.front().heading) * half);
  for (std::size_t i = 0; i + 1 < poses.size(); ++i) {
    const double k = st.kappa[i];
    for (std::size_t m = 0; m < cfg.arc_samples; ++m) {
      const double s = cfg.link_length * static_cast<double>(m) /
                       static_cast<double>(cfg.arc_samples);
      // Arc traversed backwards from node i.
      const double turn = k * s;
      const double chord = s * detail::sinc(turn / 2.0);
      const double dir = poses[i].heading - 0.5 * turn;
      pts.push_back(poses[i].position - unit(dir) * chord);
    }
  }
  pts.push_back(poses.back().position);
  pts.push_back(poses.back().position - unit(poses.back().heading) * half);
  return pts;
}

inline double kinetic_energy(const RobotConfig& cfg, const RobotState& st) {
  double e = 0.0;
  for (std::size_t i = 0; i < st.velocities.size(); ++i)
    e += 0.5 * cfg.body_mass * dot(st.velocities[i], st.velocities[i]) +
         0.5 * cfg.body_inertia() * st.angular_rates[i] * st.angular_rates[i];
  return e;
}

// Penalty contacts of the current configuration. One contact per obstacle at
// the deepest point of the backbone capsule, routed to the nearest sensor.
inline std::vector<ContactPoint> find_contacts(
    const RobotConfig& cfg, const RobotState& st,
    std::span<const Obstacle> obstacles) {
  std::vector<ContactPoint> out;
  if (obstacles.empty()) return out;
  const auto line = backbone(cfg, st);
  for (const auto& ob : obstacles) {
    double best = std::numeric_limits<double>::infinity();
    Vec2 closest;
    for (std::size_t k = 0; k + 1 < line.size(); ++k) {
      const double t = closest_param(ob.center, line[k], line[k + 1]);
      const Vec2 q = line[k] + (line[k + 1] - line[k]) * t;
      const double d = norm(ob.center - q);
      if (d < best) {
        best = d;
        closest = q;
      }
    }
    const double depth = ob.radius + cfg.body_half_width - best;
    if (depth <= 0.0) continue;
    Vec2 normal = best > 1e-12 ? (closest - ob.center) / best : Vec2{1.0, 0.0};
    ContactPoint c;
    c.point = closest - normal * cfg.body_half_width;
    c.penetration = depth;
    c.force = normal * (cfg.contact_stiffness * depth);
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < st.poses.size(); ++b)
      for (std::size_t s = 0; s < kSensorsPerBody; ++s) {
        const double d = norm(sensor_position(cfg, st.poses[b], s) - c.point);
        if (d < nearest) {
          nearest = d;
          c.body = b;
          c.sensor = s;
        }
      }
    out.push_back(c);
  }
  return out;
}

inline bool overlaps(const RobotConfig& cfg, const RobotState& st,
                     std::span<const Obstacle> obstacles) {
  return !find_contacts(cfg, st, obstacles).empty();
}

namespace detail {

inline std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> a,
                                    std::array<double, 3> b) {
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < 3; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    if (std::abs(a[c][c]) < 1e-300) throw std::domain_error("singular chain inertia");
    for (std::size_t r = c + 1; r < 3; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < 3; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::array<double, 3> x{};
  for (std::size_t c = 3; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < 3; ++k) s -= a[c][k] * x[k];
    x[c] = s / a[c][c];
  }
  return x;
}

}  // namespace detail

// One physics step of length dt driven by oscillator outputs psi.
inline StepResult step(const RobotConfig& cfg, const RobotState& state,
                       std::span<const double> psi,
                       std::span<const Obstacle> obstacles, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (psi.size() != cfg.n_links)
    throw std::invalid_argument("psi size must equal n_links");
  if (!state.finite()) throw std::domain_error("non-finite robot state");
  for (double v : psi)
    if (!std::isfinite(v)) throw std::domain_error("non-finite psi");

  const std::size_t nb = cfg.n_bodies();
  StepResult res;
  RobotState& next = res.state;
  next = state;

  // Actuation lag, integrated exactly over the step.
  const double decay = std::exp(-dt / cfg.tau_act);
  for (std::size_t i = 0; i < cfg.n_links; ++i) {
    const double target = cfg.kappa_gain * psi[i];
    next.kappa[i] = target + (state.kappa[i] - target) * decay;
  }

  const ChainShape old_shape = chain_shape(cfg, state.kappa);
  const ChainShape new_shape = chain_shape(cfg, next.kappa);
  const Pose head = state.poses.front();
  place(cfg, head, next.kappa, next.poses);

  res.contacts = find_contacts(cfg, next, obstacles);
  res.readings.assign(nb, {0.0, 0.0, 0.0, 0.0});
  for (const auto& c : res.contacts)
    res.readings[c.body][c.sensor] += norm(c.force);

  const double m = cfg.body_mass;
  const double inertia = cfg.body_inertia();
  const Vec2 r0 = head.position;
  std::array<std::array<double, 3>, 3> lhs{};
  std::array<double, 3> rhs{state.momentum.x, state.momentum.y,
                            state.angular_momentum - cross(r0, state.momentum)};
  std::vector<Vec2> shape_vel(nb), arm(nb);
  std::vector<double> shape_rate(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    shape_vel[i] = rotate(new_shape.nodes[i] - old_shape.nodes[i], head.heading) / dt;
    shape_rate[i] = (new_shape.headings[i] - old_shape.headings[i]) / dt;
    arm[i] = next.poses[i].position - r0;
    // v_i = A_i qdot + s_i with A_i = [I | perp(arm)].
    const Vec2 col2 = perp(arm[i]);
    const double A[2][3] = {{1.0, 0.0, col2.x}, {0.0, 1.0, col2.y}};
    const Vec2 t = unit(next.poses[i].heading);
    const Vec2 nrm = perp(t);
    // C = c_t t t^T + c_n n n^T
    const double C[2][2] = {
        {cfg.c_t * t.x * t.x + cfg.c_n * nrm.x * nrm.x,
         cfg.c_t * t.x * t.y + cfg.c_n * nrm.x * nrm.y},
        {cfg.c_t * t.y * t.x + cfg.c_n * nrm.y * nrm.x,
         cfg.c_t * t.y * t.y + cfg.c_n * nrm.y * nrm.y}};
    const double s[2] = {shape_vel[i].x, shape_vel[i].y};
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) {
        double mass_term = m * (A[0][r] * A[0][c] + A[1][r] * A[1][c]);
        double drag = 0.0;
        for (std::size_t p = 0; p < 2; ++p)
          for (std::size_t q = 0; q < 2; ++q) drag += A[p][r] * C[p][q] * A[q][c];
        lhs[r][c] += mass_term + dt * drag;
      }
      double g0 = m * (A[0][r] * s[0] + A[1][r] * s[1]);
      double k0 = 0.0;
      for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t q = 0; q < 2; ++q) k0 += A[p][r] * C[p][q] * s[q];
      rhs[r] -= g0 + dt * k0;
    }
    lhs[2][2] += inertia;
    rhs[2] -= inertia * shape_rate[i];
  }
  for (const auto& c : res.contacts) {
    rhs[0] += dt * c.force.x;
    rhs[1] += dt * c.force.y;
    rhs[2] += dt * cross(c.point - r0, c.force);
  }

  const auto qdot = detail::solve3(lhs, rhs);
  const Vec2 v0{qdot[0], qdot[1]};
  const double omega = qdot[2];

  next.momentum = {};
  next.angular_momentum = 0.0;
  res.friction.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    next.velocities[i] = v0 + perp(arm[i]) * omega + shape_vel[i];
    const Vec2 t = unit(next.poses[i].heading);
    const Vec2 nrm = perp(t);
    res.friction[i] = t * (-cfg.c_t * dot(next.velocities[i], t)) +
                      nrm * (-cfg.c_n * dot(next.velocities[i], nrm));
    next.angular_rates[i] = omega + shape_rate[i];
    next.momentum += next.velocities[i] * m;
    next.angular_momentum += m * cross(next.poses[i].position, next.velocities[i]) +
                             inertia * next.angular_rates[i];
  }
  next.head_velocity = next.velocities.front();

  Pose new_head{head.position + v0 * dt, head.heading + omega * dt};
  place(cfg, new_head, next.kappa, next.poses);
  if (!next.finite()) throw std::domain_error("robot state diverged");
  return res;
}

// Viscous friction force on body i at the state's velocities.
inline Vec2 friction_force(const RobotConfig& cfg, const RobotState& st,
                           std::size_t i) {
  const Vec2 t = unit(st.poses[i].heading);
  const Vec2 n = perp(t);
  const Vec2 v = st.velocities[i];
  return t * (-cfg.c_t * dot(v, t)) + n * (-cfg.c_n * dot(v, n));
}

}  // namespace snakecpg::env

#endif  // SNAKECPG_ROBOT_HPP_
